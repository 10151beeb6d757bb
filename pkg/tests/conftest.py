from pathlib import Path

import pytest

from src.certificates.certificate import parse_certificate
from src.cfg.builder import build_cfg
from src.language.parser import parse, parse_distributions, sampling_function_for

DATA = Path(__file__).resolve().parent.parent / "data"


def read(relative: str) -> str:
    return (DATA / relative).read_text(encoding="utf-8")


def load(name: str, dist: str | None = None):
    program = parse(read(f"programs/{name}.prog"))
    dists = parse_distributions(read(f"distributions/{dist}.dist")) if dist else parse_distributions("")
    return program, build_cfg(program), sampling_function_for(program, dists)


@pytest.fixture(scope="session")
def running():
    return load("recursive_running", "recursive_running")


@pytest.fixture(scope="session")
def refutation():
    return load("bounded_refutation")


@pytest.fixture(scope="session")
def walk():
    return load("random_walk", "random_walk")


@pytest.fixture(scope="session")
def running_cert():
    return parse_certificate(read("certificates/recursive_running.cert"))


@pytest.fixture(scope="session")
def refutation_cert():
    return parse_certificate(read("certificates/bounded_refutation.cert"))


@pytest.fixture(scope="session")
def refutation_weak_cert():
    return parse_certificate(read("certificates/bounded_refutation_weak.cert"))


@pytest.fixture(scope="session")
def walk_cert():
    return parse_certificate(read("certificates/random_walk.cert"))
