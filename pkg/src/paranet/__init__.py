"""Paragraph-similarity networks for characterizing texts and telling real text from shuffled text.

Typical flow::

    from paranet import corpus, experiment, netmeasure
    doc = corpus.parse_document(corpus.RawDocument("book", text))
    net = experiment.document_network(corpus.truncate_paragraphs(doc, 144), density=0.05)
    record = netmeasure.measure_network(net, "book", corpus.RT)
"""
from . import classify, corpus, experiment, kernels, netbuild, netio, netmeasure
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "classify", "corpus", "experiment", "kernels", "netbuild", "netio",
           "netmeasure", "__version__"]
