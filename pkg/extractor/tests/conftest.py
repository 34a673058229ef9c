from pathlib import Path

import pytest
import transformers

from lmextract import read_sentences_jsonl, train_demo_model

transformers.logging.set_verbosity_error()
transformers.logging.disable_progress_bar()

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    return train_demo_model(tmp_path_factory.mktemp("demo-model"))


@pytest.fixture(scope="session")
def demo(model_dir):
    from transformers import AutoModelForCausalLM, AutoTokenizer

    return (AutoModelForCausalLM.from_pretrained(model_dir),
            AutoTokenizer.from_pretrained(model_dir))


@pytest.fixture(scope="session")
def fixture_specs():
    return read_sentences_jsonl(FIXTURES / "sentences.jsonl")
