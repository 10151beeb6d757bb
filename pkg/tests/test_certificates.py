from fractions import Fraction

import pytest

from src.certificates.certificate import CertParams, VerifyBox, eval_cert, parse_certificate
from src.core.extreal import INF, ExtReal
from src.core.valuation import Valuation
from src.errors import CertificateFormatError, ParseError, VerifyBoxError
from src.simulation.semantics import StackElement
from tests.conftest import read

CERTIFICATES = ["recursive_running", "bounded_refutation", "bounded_refutation_weak", "random_walk"]


def test_header_parameters(running_cert, walk_cert):
    assert running_cert.params == CertParams(eps=Fraction(1), delta=Fraction(13), zeta=Fraction(13))
    assert walk_cert.params == CertParams(delta=Fraction(1), zeta=Fraction(1))


def test_first_matching_piece_wins(running_cert):
    assert running_cert.evaluate("f", 1, {"n": 5}) == ExtReal(56)
    assert running_cert.evaluate("f", 1, {"n": 0}) == ExtReal(2)
    assert running_cert.evaluate("f", 4, {"n": 5}) == ExtReal(21)
    assert running_cert.evaluate("f", 5, {"n": 2}) == ExtReal(Fraction(21, 2))
    assert running_cert.evaluate("f", 2, {"n": -3}) == INF
    assert eval_cert(running_cert, StackElement("g", 1, Valuation({"n": 1}))) == ExtReal(Fraction(19, 2))


def test_uncovered_valuation_is_infinite(refutation_cert):
    assert refutation_cert.evaluate("main", 2, {"n": 1, "i": 0, "c": 0}) == INF
    assert refutation_cert.evaluate("main", 14, {"n": 7, "i": 3, "c": 1}) == ExtReal(0)


def test_negative_value_is_rejected():
    h = parse_certificate("f@1: n - 3\nf@2: 0")
    assert h.evaluate("f", 1, {"n": 4}) == ExtReal(1)
    with pytest.raises(CertificateFormatError):
        h.evaluate("f", 1, {"n": 0})
    with pytest.raises(CertificateFormatError):
        h.evaluate("f", 3, {"n": 0})


@pytest.mark.parametrize("name", CERTIFICATES)
def test_canonical_text_parses_back(name):
    h = parse_certificate(read(f"certificates/{name}.cert"))
    again = parse_certificate(h.canonical_text())
    assert again == h
    assert again.digest() == h.digest()


def test_digest_ignores_layout_and_comments():
    tight = parse_certificate("eps=1\nf@1: [n>=1] 2*n ; 0\nf@2: 0")
    loose = parse_certificate("# comment\neps=1\n\nf@2:   0\nf@1: [n >= 1] 2 * n;\n  0\n")
    other = parse_certificate("eps=1\nf@1: [n>=1] 3*n ; 0\nf@2: 0")
    assert tight.digest() == loose.digest()
    assert tight.digest() != other.digest()


def test_bind_checks_coordinates(running, walk, running_cert, walk_cert):
    _, running_cfg, _ = running
    _, walk_cfg, _ = walk
    assert running_cert.bind(running_cfg) is running_cert
    with pytest.raises(CertificateFormatError):
        walk_cert.bind(running_cfg)
    partial = parse_certificate("f@1: 1\nf@2: 1\nf@3: 1\nf@4: 1\nf@5: 0\ng@1: 1\ng@2: 1")
    with pytest.raises(CertificateFormatError):
        partial.bind(walk_cfg)


@pytest.mark.parametrize(
    "text, error",
    [
        ("eps=0\nf@1: 0", CertificateFormatError),
        ("eps=2 delta=1\nf@1: 0", CertificateFormatError),
        ("eps=1 eps=2\nf@1: 0", CertificateFormatError),
        ("f@1: 0\nf@1: 1", CertificateFormatError),
        ("f@1: [n >= ] 0", ParseError),
        ("f@1: n // m", ParseError),
    ],
)
def test_invalid_certificates(text, error):
    with pytest.raises(error):
        parse_certificate(text)


def test_params_merge_overrides():
    merged = CertParams(eps=Fraction(1)).merged(zeta="5/2", delta=None)
    assert merged == CertParams(eps=Fraction(1), zeta=Fraction(5, 2))
    with pytest.raises(CertificateFormatError):
        CertParams(eps=Fraction(1)).merged(delta=Fraction(1, 2))


def test_verify_box():
    box = VerifyBox.parse("n=-2..2, c=0..1, i=7")
    assert box.bounds == {"c": (0, 1), "i": (7, 7), "n": (-2, 2)}
    assert box.size(["n", "c"]) == 10
    points = list(box.points(["n", "c"]))
    assert points[0] == {"c": 0, "n": -2}
    assert points[1] == {"c": 0, "n": -1}
    assert len(points) == 10
    assert str(box) == "c=0..1,i=7..7,n=-2..2"


@pytest.mark.parametrize("text", ["", "n=3..1", "n", "n=a..b"])
def test_invalid_boxes(text):
    with pytest.raises(VerifyBoxError):
        VerifyBox.parse(text)


def test_box_must_bound_every_variable():
    with pytest.raises(VerifyBoxError):
        VerifyBox.parse("n=0..1").size(["n", "m"])
