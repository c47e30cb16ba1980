"""Multilingual comment analytics toolkit.

Three capabilities over social-media comment corpora:

* language identification with minimal supervision, via polyglot subword
  skip-gram embeddings, k-means clustering and nearest-centroid assignment;
* lexicon-based war/peace intent scoring with daily engagement trends;
* hope-speech classification (L2 logistic regression over n-grams, intent
  score and document embeddings) with uncertainty-sampling dataset
  construction and a dual-annotator agreement workflow.
"""

__version__ = "0.1.0"
