import os

import pytest

import phicon
from phicon.corpus import Label, Sentence, Token

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def sent(*pairs) -> Sentence:
    """Build a sentence from (text, label-string) pairs."""
    return Sentence(tuple(Token(t, Label.parse(l)) for t, l in pairs))


# The paper's running example sentence, Patient + Hospital annotated.
FIG_SENTENCE = [
    ("She", "O"), ("met", "O"), ("Washington", "B-Patient"),
    ("in", "O"), ("the", "O"), ("Ohio", "B-Hospital"), ("Hospital", "I-Hospital"),
]


@pytest.fixture
def fig_sentence():
    return sent(*FIG_SENTENCE)


@pytest.fixture(scope="session")
def wndb_dir():
    return os.path.join(DATA_DIR, "wndb")


@pytest.fixture(scope="session")
def tsv_provider(tmp_path_factory):
    path = tmp_path_factory.mktemp("syn") / "fixture.tsv"
    path.write_text(
        "met\tverb\tencountered,saw\n"
        "quick\tadjective\tfast,speedy\n"
        "run\tnoun\tsprint\n"
        "run\tverb\tjog\n"
        "clinic\tnoun\thealth center\n"
        "promptly\tadverb\t\n"
        "steady\tadjective\tstable\n"
        "visit\tnoun\tappointment\n"
    )
    return phicon.load_tsv(path)


@pytest.fixture(scope="session")
def fixture_registry():
    """Small deterministic registry sufficient to resolve every type."""
    by_fine = {
        "Patient": phicon.Lexicon("Patient", ("William", "Harriet", "Douglas")),
        "Doctor": phicon.Lexicon("Doctor", ("Smith", "Nguyen", "Ortega")),
        "Hospital": phicon.Lexicon(
            "Hospital", ("Alaska Health Center", "Ridge Hospital")),
        "Location": phicon.Lexicon("Location", ("Boston", "Tulsa")),
        "Organization": phicon.Lexicon("Organization", ("Acme Care", "Zenith Health")),
    }
    for phi_type, spec in phicon.DEFAULT_GENERATOR_SPECS.items():
        by_fine[phi_type] = phicon.generate_identifiers(spec, 50, seed=9)
    return phicon.LexiconRegistry(by_fine)


# ---------------------------------------------------------------------------
# Session-scoped experiment fixtures (shared by evaluate + acceptance tests,
# which are the expensive part of the suite).

@pytest.fixture(scope="session")
def site_corpora():
    """SiteA/SiteB at acceptance-default scale, coarse-mapped."""
    profile_a, profile_b = phicon.builtin_profiles()
    corpus_a = phicon.map_to_coarse(
        phicon.generate_corpus(profile_a, 200, (8, 15), seed=11))
    corpus_b = phicon.map_to_coarse(
        phicon.generate_corpus(profile_b, 200, (8, 15), seed=22))
    return corpus_a, corpus_b


@pytest.fixture(scope="session")
def site_splits(site_corpora):
    corpus_a, corpus_b = site_corpora
    train_a, dev_a, test_a = phicon.split_corpus(corpus_a, (0.7, 0.1, 0.2), seed=5)
    train_b, dev_b, test_b = phicon.split_corpus(corpus_b, (0.7, 0.1, 0.2), seed=5)
    return {"train_a": train_a, "dev_a": dev_a, "test_a": test_a,
            "train_b": train_b, "dev_b": dev_b, "test_b": test_b,
            "all_b": corpus_b}


@pytest.fixture(scope="session")
def builtin_registry_s():
    return phicon.builtin_registry(seed=3)


@pytest.fixture(scope="session")
def builtin_provider_s():
    return phicon.builtin_provider()
