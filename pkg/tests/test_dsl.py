import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unstable_mzi.dsl import (
    HBAR_SI,
    DiagnosticCode,
    OracleOverrides,
    PhaseElement,
    SegmentElement,
    SweepSpec,
    parse,
    serialize,
)
from unstable_mzi.errors import DomainError

from _corpus import INVALID_DOCUMENTS, random_document

MINIMAL = """\
particle { k = 6.28; ell = 100.0; }
upper { segment(length = 1.0); }
lower { segment(length = 1.0); }
"""


class TestParseValid:
    def test_minimal_document_with_defaults(self):
        result = parse(MINIMAL)
        assert result.ok
        doc = result.document
        assert doc.particle.k == 6.28
        assert doc.particle.ell == 100.0
        assert doc.upper == (SegmentElement("segment", 1.0, 1.0),)
        assert doc.splitter == "symmetric"
        assert doc.sweep is None
        assert doc.oracle is None

    def test_elements_and_sections(self):
        text = """
        # a fuller document
        particle { k = 2.0; ell = 50.0; label = "probe"; }
        upper {
            segment(length = 5.0);
            cavity(length = 3.0, gamma_ratio = 0.0);
        }
        lower { segment(length = 8.0); phase(phi = 1.5); }
        splitter { convention = hadamard; }
        sweep { parameter = gamma_ratio; start = 0.0; end = 2.0; steps = 11; }
        oracle { packet_width = 9.5; }
        """
        result = parse(text)
        assert result.ok, result.diagnostics
        doc = result.document
        assert doc.particle.label == "probe"
        assert doc.upper[1] == SegmentElement("cavity", 3.0, 0.0)
        assert doc.lower[1] == PhaseElement(1.5)
        assert doc.splitter == "hadamard"
        assert doc.sweep == SweepSpec("gamma_ratio", 0.0, 2.0, 11, "linear")
        assert doc.oracle == OracleOverrides(packet_width=9.5)

    def test_stable_sentinel(self):
        result = parse(MINIMAL.replace("ell = 100.0", "ell = inf"))
        assert result.ok
        assert math.isinf(result.document.particle.ell)

    def test_si_conversion(self):
        text = """
        particle { momentum_si = 1.0e-27; mass_si = 1.0e-26; gamma_si = 1.0e6; }
        upper { segment(length = 1.0); }
        lower { segment(length = 1.0); }
        """
        result = parse(text)
        assert result.ok, result.diagnostics
        particle = result.document.particle
        assert particle.k == pytest.approx(1.0e-27 / HBAR_SI)
        assert particle.ell == pytest.approx(1.0e-27 / (1.0e-26 * 1.0e6))

    def test_si_zero_rate_is_stable(self):
        text = """
        particle { momentum_si = 1.0e-27; mass_si = 1.0e-26; gamma_si = 0.0; }
        upper { segment(length = 1.0); }
        lower { segment(length = 1.0); }
        """
        result = parse(text)
        assert result.ok
        assert math.isinf(result.document.particle.ell)

    def test_comments_and_whitespace_insensitive(self):
        messy = ("particle{k=6.28;ell=100.0;}  # compact\n"
                 "upper{segment(length=1.0);}\n"
                 "lower{segment(length=1.0);}\n")
        assert parse(messy).document == parse(MINIMAL).document

    def test_to_layout(self):
        text = """
        particle { k = 2.0; ell = 50.0; }
        upper { cavity(length = 3.0, gamma_ratio = 0.0); segment(length = 5.0); }
        lower { segment(length = 8.0); phase(phi = 0.25); }
        """
        doc = parse(text).document
        layout = doc.to_layout()
        assert layout.upper[0].cavity
        assert layout.upper[0].gamma_ratio == 0.0
        assert layout.lower[1].length == 0.0
        assert layout.lower[1].phase_offset == 0.25
        assert layout.splitter.name == "symmetric"
        assert layout.is_length_symmetric


class TestDiagnostics:
    @pytest.mark.parametrize("text,code", INVALID_DOCUMENTS,
                             ids=[c.value for _, c in INVALID_DOCUMENTS])
    def test_invalid_fixture_codes(self, text, code):
        result = parse(text)
        assert not result.ok
        assert code in {d.code for d in result.diagnostics}, result.diagnostics

    def test_negative_length_points_at_literal(self):
        text = ("particle { k = 1.0; ell = 2.0; }\n"
                "upper { segment(length = -1.0); }\n"
                "lower { segment(length = 1.0); }")
        result = parse(text)
        diag = next(d for d in result.diagnostics
                    if d.code is DiagnosticCode.CONSTRAINT_NEGATIVE_LENGTH)
        assert diag.token == "-1.0"
        assert diag.line == 2
        assert text[diag.offset:diag.offset + 4] == "-1.0"
        assert diag.hint

    def test_diagnostics_point_inside_text(self):
        for text, _ in INVALID_DOCUMENTS:
            for diag in parse(text).diagnostics:
                assert 0 <= diag.offset < len(text)
                assert diag.line >= 1
                assert diag.column >= 1

    def test_empty_input_reports_missing_sections(self):
        result = parse("")
        assert not result.ok
        codes = {d.code for d in result.diagnostics}
        assert DiagnosticCode.MISSING_SECTION in codes


class TestTotality:
    @given(st.text(max_size=300))
    @settings(max_examples=300)
    def test_never_raises(self, text):
        result = parse(text)
        assert result.ok or result.diagnostics
        if text:
            for diag in result.diagnostics:
                assert 0 <= diag.offset < len(text)

    @given(st.text(alphabet="particle{}()=;,#\"\n .0123456789abcdefk", max_size=200))
    @settings(max_examples=300)
    def test_never_raises_near_grammar(self, text):
        parse(text)

    def test_deterministic(self):
        text = INVALID_DOCUMENTS[0][0]
        assert parse(text) == parse(text)
        assert parse(MINIMAL).document == parse(MINIMAL).document


class TestSerialize:
    GOLDEN = """\
particle {
  ell = 100.0;
  k = 6.283185307179586;
  label = "excited probe";
}
upper {
  segment(gamma_ratio = 1.0, length = 10.0);
  cavity(gamma_ratio = 0.5, length = 20.0);
  segment(gamma_ratio = 1.0, length = 50.0);
}
lower {
  segment(gamma_ratio = 1.0, length = 80.0);
  phase(phi = 0.0);
}
splitter {
  convention = symmetric;
}
"""

    def test_golden_canonical_text(self, fixtures_dir):
        doc = parse((fixtures_dir / "baseline.ifl").read_text()).document
        assert serialize(doc) == self.GOLDEN

    def test_canonicalizes_messy_input(self):
        messy = ("lower{segment(length=80.0);phase(phi=0.0);}\n"
                 "particle{label=\"excited probe\";k=6.283185307179586;ell=100.0;}\n"
                 "upper{segment(length=10.0);cavity(gamma_ratio=0.5,length=20.0);"
                 "segment(length=50.0);}\n")
        doc = parse(messy).document
        assert serialize(doc) == self.GOLDEN

    def test_serialize_is_fixed_point(self):
        doc = parse(self.GOLDEN).document
        assert serialize(parse(serialize(doc)).document) == serialize(doc)

    def test_label_with_quote_rejected(self):
        doc = parse(MINIMAL).document
        from dataclasses import replace
        from unstable_mzi.core import UnstableParticle
        bad = replace(doc, particle=UnstableParticle(k=1.0, ell=1.0, label='a"b'))
        with pytest.raises(DomainError):
            serialize(bad)


class TestRoundTrip:
    def test_random_corpus(self):
        rng = random.Random(20260810)
        for _ in range(300):
            doc = random_document(rng)
            text = serialize(doc)
            result = parse(text)
            assert result.ok, (text, result.diagnostics)
            assert result.document == doc

    def test_sweep_and_oracle_sections_round_trip(self):
        rng = random.Random(99)
        seen_sweep = seen_oracle = False
        for _ in range(200):
            doc = random_document(rng)
            seen_sweep = seen_sweep or doc.sweep is not None
            seen_oracle = seen_oracle or doc.oracle is not None
            assert parse(serialize(doc)).document == doc
        assert seen_sweep and seen_oracle


class TestSweepSpecValidation:
    def test_valid(self):
        spec = SweepSpec("gamma_ratio", 0.0, 2.0, 5)
        assert spec.scale == "linear"

    @pytest.mark.parametrize("kwargs", [
        dict(parameter="bogus", start=0.0, end=1.0, steps=5),
        dict(parameter="phase", start=0.0, end=1.0, steps=1),
        dict(parameter="phase", start=1.0, end=1.0, steps=5),
        dict(parameter="phase", start=-1.0, end=1.0, steps=5, scale="log"),
        dict(parameter="phase", start=0.0, end=math.inf, steps=5),
        dict(parameter="phase", start=0.0, end=1.0, steps=5, scale="cubic"),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            SweepSpec(**kwargs)
