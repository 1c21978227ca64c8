"""Hindi politeness classification: structure detectors, n-gram features, linear SVM."""

__version__ = "0.1.0"

from .corpus import (LABELS, AgreementReport, Comment, Corpus, PolitenessLabel, SplitSpec,
                     compute_agreement, load_corpus, split)
from .errors import CorpusError, FeatureError, LexiconError, ModelError, PolitenessError
from .evaluation import AblationReport, Metrics, evaluate, metrics_from_labels, run_ablation, tune
from .features import UNI, UNI_BI, UNI_BI_STRUCT, FeatureConfig, FeatureVector, Vocabulary, build_vocabulary, vectorize
from .structures import KINDS, Lexicon, StructureKind, detect, load_lexicon, profile, profile_text
from .svm import SvmModel, TrainConfig, load_model, predict, save_model, train
from .textproc import normalize, ngrams, tokenize
