"""Test state, certificate and canonical-form files"""
import json

import numpy as np
import pytest

from exceptions import StateFileError
from models import DensityOperator, TriDims
from canonical.canonical_form import extract_canonical
from data.state_files import (
    decomposition_from_file, dumps, load_canonical, load_certificate, load_state,
    save_canonical, save_certificate, save_state, state_to_file
)
from decompose.certifier import certify_rank_n_separability
from decompose.decomposer import verify_decomposition
from statezoo.generators import random_canonical_state


@pytest.fixture
def canonical_state():
    """Seeded rank-3 canonical state on 2x3x3"""
    rho, _ = random_canonical_state(3, seed=42)
    return rho


class TestStateFiles:
    def test_save_and_load(self, tmp_path, canonical_state):
        path = tmp_path / "state.json"
        save_state(path, canonical_state, seed=42, kind="canonical")
        loaded = load_state(path)
        assert loaded.dims == TriDims(2, 3, 3)
        assert np.array_equal(loaded.entries, canonical_state.entries)
        payload = json.loads(path.read_text())
        assert payload["meta"] == {"seed": 42, "kind": "canonical", "normalized": True}

    def test_byte_stable(self, tmp_path, canonical_state):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        save_state(first, canonical_state, seed=1)
        save_state(second, load_state(first), seed=1)
        assert first.read_bytes() == second.read_bytes()
        assert dumps(state_to_file(canonical_state)).endswith("}\n")

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\n  \"dims\": [2, 3,\n")
        with pytest.raises(StateFileError) as info:
            load_state(path)
        assert info.value.line is not None
        assert str(info.value).startswith(f"{path}:{info.value.line}:")

    def test_wrong_matrix_size(self, tmp_path):
        path = tmp_path / "small.json"
        path.write_text(json.dumps({"dims": [2, 3, 2], "matrix": {"re": [[1.0]], "im": [[0.0]]}}))
        with pytest.raises(StateFileError) as info:
            load_state(path)
        assert "does not match dims" in str(info.value)

    def test_bad_dims(self, tmp_path):
        path = tmp_path / "dims.json"
        path.write_text(json.dumps({"dims": [2, 3], "matrix": {"re": [[1.0]], "im": [[0.0]]}}))
        with pytest.raises(StateFileError) as info:
            load_state(path)
        assert any(detail.startswith("dims") for detail in info.value.details)

    def test_validation_error_points_at_field(self, tmp_path):
        path = tmp_path / "dims.json"
        path.write_text(json.dumps({"matrix": {"re": [[1.0]], "im": [[0.0]]}, "dims": [2, 3]}, indent=2))
        with pytest.raises(StateFileError) as info:
            load_state(path)
        lines = path.read_text().splitlines()
        dims_line = next(i for i, line in enumerate(lines, start=1) if '"dims"' in line)
        assert info.value.line == dims_line
        assert info.value.column == lines[dims_line - 1].index('"dims"') + 1
        assert str(info.value).startswith(f"{path}:{dims_line}:")

    def test_document_level_error_anchored_at_start(self, tmp_path):
        path = tmp_path / "small.json"
        path.write_text(json.dumps({"dims": [2, 3, 2], "matrix": {"re": [[1.0]], "im": [[0.0]]}}))
        with pytest.raises(StateFileError) as info:
            load_state(path)
        assert (info.value.line, info.value.column) == (1, 1)

    def test_non_hermitian(self, tmp_path):
        entries = np.eye(6, dtype=complex) / 6
        entries[0, 1] = 0.1
        save_state(tmp_path / "nh.json", DensityOperator(TriDims(1, 2, 3), entries, normalized=False))
        with pytest.raises(StateFileError) as info:
            load_state(tmp_path / "nh.json")
        assert "not Hermitian" in str(info.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(StateFileError) as info:
            load_state(tmp_path / "absent.json")
        assert info.value.line is None


class TestCertificateFiles:
    def test_round_trip_verifies(self, tmp_path, canonical_state):
        cert = certify_rank_n_separability(canonical_state)
        path = tmp_path / "cert.json"
        save_certificate(path, cert)
        payload = load_certificate(path)
        assert len(payload.terms) == 3
        assert len(payload.residuals.commutators) == 9
        assert len(payload.residuals.ppt_min_eigs) == 6
        assert payload.pipeline.tool_version == cert.tool_version
        assert verify_decomposition(canonical_state, decomposition_from_file(payload)).passed

    def test_non_positive_weight_rejected(self, tmp_path, canonical_state):
        path = tmp_path / "cert.json"
        save_certificate(path, certify_rank_n_separability(canonical_state))
        data = json.loads(path.read_text())
        data["terms"][0]["w"] = 0.0
        path.write_text(json.dumps(data, indent=2))
        with pytest.raises(StateFileError) as info:
            load_certificate(path)
        w_lines = [i for i, line in enumerate(path.read_text().splitlines(), start=1) if '"w"' in line]
        assert info.value.line == w_lines[0]

    def test_bad_weight_in_later_term_located(self, tmp_path, canonical_state):
        path = tmp_path / "cert.json"
        save_certificate(path, certify_rank_n_separability(canonical_state))
        data = json.loads(path.read_text())
        data["terms"][2]["w"] = -1.0
        path.write_text(json.dumps(data, indent=2))
        with pytest.raises(StateFileError) as info:
            load_certificate(path)
        w_lines = [i for i, line in enumerate(path.read_text().splitlines(), start=1) if '"w"' in line]
        assert info.value.line == w_lines[2]

    def test_pruning_and_relative_residual_recorded(self, tmp_path, canonical_state):
        cert = certify_rank_n_separability(canonical_state)
        path = tmp_path / "cert.json"
        save_certificate(path, cert)
        payload = load_certificate(path)
        assert payload.pipeline.pruned_terms == cert.pruned_terms == 0
        assert payload.pipeline.tolerances["prune_weight_tol"] == cert.tolerances["prune_weight_tol"]
        assert payload.residuals.reconstruction_relative == cert.relative_residual


class TestCanonicalFiles:
    def test_round_trip(self, tmp_path, canonical_state):
        cf, residuals = extract_canonical(canonical_state)
        path = tmp_path / "form.json"
        save_canonical(path, cf, residuals)
        loaded = load_canonical(path)
        for name in ("B", "C", "D", "F", "rotation_a", "rotation_b", "charlie_filter"):
            assert np.array_equal(getattr(loaded, name), getattr(cf, name))
        assert loaded.pivot.trial == cf.pivot.trial
