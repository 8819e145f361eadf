from pathlib import Path

from tmkit.dsl import load_model, load_model_file, parse_script, parse_script_file
from tmkit.engine import run_script

CORPUS = Path(__file__).parent.parent / "corpus"

CORPUS_MODELS = ["cart.tm", "flight.tm", "order.tm", "edp.tm"]
SIMPLIFIED_MODELS = ["flight.tm", "order.tm", "edp.tm"]


def corpus_path(name: str) -> str:
    return str(CORPUS / name)


def load_bundle(name: str):
    result = load_model_file(corpus_path(name))
    assert result.success, [str(d) for d in result.diagnostics]
    return result.bundle


def bundle_from(text: str):
    result = load_model(text)
    assert result.success, [str(d) for d in result.diagnostics]
    return result.bundle


def script(text: str):
    result = parse_script(text)
    assert result.success, [str(d) for d in result.diagnostics]
    return result.value


def load_script(name: str):
    result = parse_script_file(corpus_path(name))
    assert result.success, [str(d) for d in result.diagnostics]
    return result.value


def run_corpus(model: str, name: str):
    return run_script(load_bundle(model), load_script(name))
