import json

import numpy as np
import pytest

from etfbounds import frames as fr
from etfbounds import measurement as m
from etfbounds.numerics import maximally_mixed, random_density, random_ket


def test_basis_povm_is_projective():
    povm = m.povm_from_frame(fr.orthonormal_basis_frame(3))
    for j, e in enumerate(povm.elements):
        assert np.allclose(e, np.diag(np.eye(3)[j]))


def test_element_traces(sic_qubit):
    povm = m.povm_from_frame(fr.simplex_etf(2))
    assert np.allclose([np.trace(e).real for e in povm.elements], 2 / 3)
    povm = m.povm_from_frame(sic_qubit)
    assert sum(np.trace(e).real for e in povm.elements) == pytest.approx(2)
    assert povm.completeness_residual() <= 1e-10


def test_povm_rejects_invalid_frame():
    bad = fr.EquiangularTightFrame(fr.etf_parameters(2, 2), np.array([[1, 0], [1, 0]], dtype=complex))
    with pytest.raises(fr.InvalidFrameError):
        m.povm_from_frame(bad)


def test_maximally_mixed_gives_uniform(frame_zoo):
    for frame in frame_zoo.values():
        dist = m.outcome_distribution(m.povm_from_frame(frame), maximally_mixed(frame.d))
        assert np.allclose(dist.probs, 1 / frame.n, atol=1e-12)


def test_frame_state_distribution(sic_qubit):
    frame = sic_qubit
    povm = m.povm_from_frame(frame)
    d, n, c = frame.d, frame.n, frame.params.overlap
    for i in range(n):
        rho = np.outer(frame.vectors[i], frame.vectors[i].conj())
        p = m.outcome_distribution(povm, rho).probs
        assert p[i] == pytest.approx(d / n, abs=1e-12)
        others = np.delete(p, i)
        assert np.allclose(others, c * d / n, atol=1e-12)
        assert m.index_of_coincidence(p) == pytest.approx(1 / 3, abs=1e-12)


def test_max_probability_cap(frame_zoo):
    for frame in frame_zoo.values():
        povm = m.povm_from_frame(frame)
        for seed in range(1000):
            rho = random_density(frame.d, 1 + seed % frame.d, seed)
            dist = m.outcome_distribution(povm, rho)
            assert dist.probs.sum() == pytest.approx(1, abs=1e-9)
            assert dist.probs.min() >= 0
            assert dist.max_probability() <= frame.d / frame.n + 1e-12


def test_completeness_on_random_kets(frame_zoo):
    for frame in frame_zoo.values():
        for seed in range(100):
            psi = random_ket(frame.d, seed)
            total = np.sum(np.abs(frame.vectors.conj() @ psi) ** 2)
            assert total == pytest.approx(frame.params.s, abs=1e-9)


def test_distribution_dimension_mismatch(sic_qubit):
    with pytest.raises(ValueError):
        m.outcome_distribution(m.povm_from_frame(sic_qubit), maximally_mixed(3))


def test_index_of_coincidence_examples():
    assert m.index_of_coincidence(np.full(4, 0.25)) == 0.25
    assert m.index_of_coincidence(np.array([0, 1.0, 0])) == 1.0


def test_clamp_records_deviation():
    probs, dev = m.clamp_probabilities([-1e-13, 0.5, 0.5 + 1e-13])
    assert probs.min() == 0 and dev == pytest.approx(1e-13)
    with pytest.raises(ValueError):
        m.clamp_probabilities([0.2, 0.2])


def _psi_oracle(frame):
    # explicit loops over (phidf)/(psidf) with Kronecker products
    n, S, c = frame.n, frame.params.s, frame.params.overlap
    omega = np.exp(2j * np.pi / n)
    rows = []
    for k in range(n):
        acc = sum(omega ** (k * j) * np.kron(frame.vectors[j], frame.vectors[j].conj()) for j in range(n))
        rows.append(acc / np.sqrt(n * S if k == 0 else n - n * c))
    return np.array(rows)


def test_psi_family_matches_oracle(frame_zoo):
    for frame in frame_zoo.values():
        fam = m.psi_family(frame)
        assert np.allclose(fam.vectors, _psi_oracle(frame), atol=1e-13)
        assert fam.orthonormality_residual() <= 1e-9


def test_overlap_sum(frame_zoo):
    for frame in frame_zoo.values():
        assert m.overlap_sum(frame) == pytest.approx(frame.n * frame.params.s, abs=1e-9)


def test_psi_family_basis_reduces_to_fourier():
    frame = fr.orthonormal_basis_frame(3)
    fam = m.psi_family(frame)
    omega = np.exp(2j * np.pi / 3)
    for k in range(3):
        expected = sum(omega ** (k * j) * np.kron(np.eye(3)[j], np.eye(3)[j]) for j in range(3)) / np.sqrt(3)
        assert np.allclose(fam.vectors[k], expected)


def test_psi_family_excludes_one_dimensional_frames():
    with pytest.raises(ValueError):
        m.psi_family(fr.naimark_complement(fr.simplex_etf(2)))


def test_density_round_trip(tmp_path):
    rho = random_density(3, seed=4)
    path = tmp_path / "rho.json"
    m.save_density(path, rho)
    back, dA, dB = m.load_density(path)
    assert dA is None and np.array_equal(back, rho)
    m.save_density(path, np.kron(rho, rho), 3, 3)
    data = json.loads(path.read_text())
    assert data["dA"] == 3 and data["dB"] == 3 and data["d"] == 9
    _, dA, dB = m.load_density(path)
    assert (dA, dB) == (3, 3)


def test_density_file_errors():
    with pytest.raises(ValueError):
        m.density_from_dict({"d": 2, "matrix": [[[1, 0]]]})
    with pytest.raises(ValueError):
        m.density_from_dict({"d": 4, "dA": 2, "matrix": np.eye(4).tolist()})
