"""Tests for model document parsing, resolution and emission."""

import json
from fractions import Fraction as Fr

import pytest

from prplab.document import ModelDocument, emit_model, parse_model
from prplab.exceptions import (
    ModelParseError,
    ModelValidationError,
    NonPositiveProbabilityError,
    ProbabilitySumNotOneError,
)
from prplab.session import bundled_models, read_model_text


def _document(**overrides):
    data = {
        "name": "T",
        "space": {"outcomes": ["a", "b"], "probabilities": ["1/2", "1/2"], "horizon": 1},
        "processes": {"X": [["0", "1"], ["0", "-1"]]},
    }
    data.update(overrides)
    return json.dumps(data)


class TestParse:
    def test_minimal(self):
        doc = parse_model(_document())
        model = doc.resolve()
        assert model.space.size == 2
        assert model.processes["X"].terminal().values == (1, -1)
        assert model.space.measure.weights == (Fr(1, 2), Fr(1, 2))

    def test_integers_accepted(self):
        doc = parse_model(_document(processes={"X": [[0, 1], [0, -1]]}))
        assert doc.processes["X"][0] == ["0", "1"]

    def test_default_filtration_is_natural(self):
        model = parse_model(_document()).resolve()
        assert model.space.filtration[0].blocks == ((0, 1),)
        assert model.space.filtration[1].blocks == ((0,), (1,))

    def test_explicit_filtration(self):
        doc = parse_model(
            _document(filtration={"explicit": [[["a", "b"]], [["a"], ["b"]]]})
        )
        assert doc.resolve().space.filtration[1].blocks == ((0,), (1,))

    def test_named_entities(self):
        model = parse_model(read_model_text("COIN2")).resolve()
        assert set(model.processes) == {"M", "N"}
        assert model.random_variables["H"].values == (1, -1, -1, 1)
        assert model.measures["Q"].weights[1] == Fr(3, 8)

    @pytest.mark.parametrize("value", ["1/0", "2/4", "0.5", "abc", True])
    def test_bad_rational(self, value):
        with pytest.raises(ModelParseError) as info:
            parse_model(_document(processes={"X": [["0", value], ["0", "-1"]]}))
        assert info.value.context["field"].startswith("processes.X")

    def test_malformed_json_reports_position(self):
        with pytest.raises(ModelParseError) as info:
            parse_model('{"name": "T",, }')
        assert info.value.context["line"] == 1
        assert "column" in info.value.context

    def test_top_level_must_be_object(self):
        with pytest.raises(ModelParseError):
            parse_model("[1, 2]")

    def test_extra_field_rejected(self):
        with pytest.raises(ModelParseError) as info:
            parse_model(_document(colour="blue"))
        assert info.value.context["field"] == "colour"

    def test_both_filtration_forms_rejected(self):
        with pytest.raises(ModelParseError):
            parse_model(
                _document(filtration={"natural": ["X"], "explicit": [[["a", "b"]], [["a"], ["b"]]]})
            )

    def test_missing_space(self):
        with pytest.raises(ModelParseError) as info:
            parse_model(json.dumps({"name": "T"}))
        assert info.value.context["field"] == "space"


class TestResolve:
    def test_row_count(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model(_document(processes={"X": [["0", "1"]]}))
        assert info.value.context["field"] == "processes.X"

    def test_column_count(self):
        with pytest.raises(ModelValidationError):
            parse_model(_document(processes={"X": [["0", "1", "2"], ["0", "1", "2"]]}))

    def test_unknown_outcome(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model(_document(filtration={"explicit": [[["a", "b"]], [["a"], ["c"]]]}))
        assert info.value.invariant == "known outcomes"

    def test_named_filtration_must_cover_outcomes(self):
        space = {"outcomes": ["a", "b", "c"], "probabilities": ["1/3"] * 3, "horizon": 1}
        text = _document(
            space=space,
            processes={"X": [["0", "1"], ["0", "-1"], ["0", "0"]]},
            filtrations={"H": [[["a", "b"]], [["a"], ["b"]]]},
        )
        with pytest.raises(ModelValidationError) as info:
            parse_model(text)
        assert info.value.invariant == "partitions cover the outcomes"
        assert info.value.context["field"] == "filtrations.H.0"
        assert "'c'" in info.value.message

    def test_outcome_in_two_blocks(self):
        explicit = [[["a", "b"]], [["a"], ["a", "b"]]]
        with pytest.raises(ModelValidationError) as info:
            parse_model(_document(filtration={"explicit": explicit}))
        assert info.value.invariant == "each outcome in one block"
        assert info.value.context["field"] == "filtration.explicit.1"

    def test_unknown_natural_process(self):
        with pytest.raises(ModelValidationError):
            parse_model(_document(filtration={"natural": ["Y"]}))

    def test_unadapted_process(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model(_document(filtration={"explicit": [[["a", "b"]], [["a", "b"]]]}))
        assert info.value.invariant == "adapted processes"

    def test_time_outside_grid(self):
        with pytest.raises(ModelValidationError) as info:
            parse_model(_document(random_times={"TAU": [1, 2]}))
        assert info.value.invariant == "times within the grid"

    def test_measure_length(self):
        with pytest.raises(ModelValidationError):
            parse_model(_document(measures={"Q": ["1"]}))

    def test_repeated_outcomes(self):
        space = {"outcomes": ["a", "a"], "probabilities": ["1/2", "1/2"], "horizon": 1}
        with pytest.raises(ModelValidationError):
            parse_model(_document(space=space))

    def test_zero_probability(self):
        space = {"outcomes": ["a", "b"], "probabilities": ["1", "0"], "horizon": 1}
        with pytest.raises(NonPositiveProbabilityError):
            parse_model(_document(space=space))

    def test_probabilities_must_sum_to_one(self):
        space = {"outcomes": ["a", "b"], "probabilities": ["1/2", "1/3"], "horizon": 1}
        with pytest.raises(ProbabilitySumNotOneError):
            parse_model(_document(space=space))


class TestEmit:
    @pytest.mark.parametrize("name", bundled_models())
    def test_emission_is_stable(self, name):
        first = emit_model(parse_model(read_model_text(name)))
        assert emit_model(parse_model(first)) == first
        assert first.endswith("\n")

    def test_canonical_rationals(self):
        doc = parse_model(_document(processes={"X": [["0", "-0"], ["0", "0"]]}))
        assert doc.processes["X"][0] == ["0", "0"]

    def test_omits_absent_filtration(self):
        payload = json.loads(emit_model(parse_model(_document())))
        assert "filtration" not in payload

    def test_model_validate_roundtrip(self):
        doc = parse_model(read_model_text("TAU"))
        again = ModelDocument.model_validate(json.loads(emit_model(doc)))
        assert again == doc
