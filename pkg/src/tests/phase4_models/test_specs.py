"""
Phase 4: Model Specification Tests

Spec parsing, the candidate grid and closed-form parameter counts checked
against the parameters the models actually register.
"""
import pytest
from pydantic import ValidationError

from src.common.errors import ModelConfigError
from src.dataset.models import JOINT_ORDER
from src.models.factory import build_model
from src.models.specs import (
    FULL_GRID,
    GnnGruSpec,
    TransformerSpec,
    parameter_count,
    parse_grid,
    parse_spec,
)


@pytest.mark.phase4
class TestSpecParsing:
    """Labels to specs and back"""

    def test_transformer_label(self):
        """Verify a transformer label parses with default depth"""
        spec = parse_spec("transformer:4,64,128")
        assert spec == TransformerSpec(heads=4, d_l=64, d_f=128)
        assert spec.layers == 3
        assert spec.label == "transformer:4,64,128"

    def test_gnn_gru_label(self):
        """Verify a GNN-GRU label parses"""
        spec = parse_spec(" gnn_gru:3,32 ")
        assert spec == GnnGruSpec(gnn_layers=3, hidden_units=32)
        assert spec.label == "gnn_gru:3,32"

    @pytest.mark.parametrize(
        "text",
        ["transformer:4,64", "gnn_gru:2", "lstm:2,64", "transformer:a,b,c", "transformer:3,64,128"],
    )
    def test_bad_labels_rejected(self, text):
        """Verify malformed, unknown or inconsistent labels raise ModelConfigError"""
        with pytest.raises(ModelConfigError):
            parse_spec(text)

    def test_heads_must_divide_latent(self):
        """Verify d_l not divisible by heads fails validation"""
        with pytest.raises(ValidationError):
            TransformerSpec(heads=3, d_l=64, d_f=128)

    def test_full_grid(self):
        """Verify the full grid holds six transformers and six GNN-GRUs"""
        grid = parse_grid("full")
        assert len(grid) == 12
        assert sum(isinstance(s, TransformerSpec) for s in grid) == 6
        assert grid == FULL_GRID

    def test_custom_grid(self):
        """Verify a semicolon-separated grid keeps order"""
        grid = parse_grid("gnn_gru:2,32; transformer:1,4,8")
        assert [s.label for s in grid] == ["gnn_gru:2,32", "transformer:1,4,8"]

    def test_empty_custom_grid_rejected(self):
        """Verify a grid of separators only is rejected"""
        with pytest.raises(ModelConfigError):
            parse_grid(";;")


@pytest.mark.phase4
class TestParameterCount:
    """Closed-form counts"""

    def test_smallest_transformer_whole_body(self):
        """Verify the count of the smallest transformer over 15 joints"""
        assert parameter_count(TransformerSpec(heads=2, d_l=32, d_f=64), 15, 101) == 27137

    def test_smallest_gnn_gru_whole_body(self):
        """Verify the count of the smallest GNN-GRU over 15 joints"""
        assert parameter_count(GnnGruSpec(gnn_layers=2, hidden_units=32), 15, 101) == 50401

    @pytest.mark.parametrize("spec", FULL_GRID, ids=lambda s: s.label)
    @pytest.mark.parametrize("n_joints", [1, 3, 15])
    def test_matches_built_model(self, spec, n_joints):
        """Verify the closed form equals the registered parameter count"""
        model = build_model(spec, tuple(JOINT_ORDER[:n_joints]), n_frames=10)
        assert model.parameter_count == parameter_count(spec, n_joints, 10)

    def test_independent_of_frames(self):
        """Verify the number of frames does not change the count"""
        spec = TransformerSpec(heads=2, d_l=8, d_f=16)
        assert parameter_count(spec, 5, 10) == parameter_count(spec, 5, 101)
