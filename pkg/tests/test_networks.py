import json

import numpy as np
import pytest

from octorail.exact import ExactCoeff, ExactMatrix
from octorail.networks import (EIGHTSPLITTER_SIGNS, build_network,
                               cancel_layer, check_layer_commutation,
                               layer_matrix, verify_eightsplitter, x_block)


def test_level_structure():
    for level, n_modes in ((0, 2), (1, 4), (2, 8)):
        net = build_network(level)
        assert net.n_modes == n_modes
        assert len(net.layers) == level + 1
        for layer in net.layers:
            assert len(layer) == n_modes // 2


def test_eight_mode_transfer_matrix_rows():
    report = verify_eightsplitter()
    assert [r["pass"] for r in report] == [True] * 8


def test_transfer_matrix_entries_exact():
    s = x_block(build_network(2))
    for row, ref in zip(s.rows, EIGHTSPLITTER_SIGNS):
        for entry, sign in zip(row, ref):
            assert entry == ExactCoeff.from_half_power(sign, 3)


def test_transfer_matrix_is_orthogonal():
    s = x_block(build_network(2))
    f = s.to_float()
    assert np.allclose(f @ f.T, np.eye(8), atol=1e-12)


def test_layer_commutation_all_levels():
    for level in (0, 1, 2):
        assert check_layer_commutation(build_network(level))["all_commute"]


def test_cancel_outer_layer_reduces_to_two_quads():
    net = build_network(2)
    # equal angles on every pair of the mode-distance-4 layer
    angles = [0.0, 0.1, 0.2, 0.3, 0.0, 0.1, 0.2, 0.3]
    red = cancel_layer(net, angles)
    assert red.removed_tag == "ORL"
    assert red.components == ((0, 1, 2, 3), (4, 5, 6, 7))
    # each component is isomorphic to the level-1 network
    quad = build_network(1)
    first = tuple(tuple(p for p in layer if p[0] < 4)
                  for layer in red.reduced.layers)
    second = tuple(tuple((a - 4, b - 4) for a, b in layer if a >= 4)
                   for layer in red.reduced.layers)
    assert first == quad.layers
    assert second == quad.layers


def test_cancellation_recombination_rule():
    net = build_network(2)
    angles = [0.0] * 8
    red = cancel_layer(net, angles)
    # removed pairs (j, k): outcomes (m_j + m_k)/sqrt2 and (m_k - m_j)/sqrt2
    rec = red.recombination
    half = ExactCoeff.from_half_power(1, 1)
    pair = next(l for l, t in zip(net.layers, net.level_tags)
                if t == red.removed_tag)[0]
    j, k = pair
    assert rec.rows[j][j] == half and rec.rows[j][k] == half
    assert rec.rows[k][j] == -half and rec.rows[k][k] == half
    # the rule composed with the removed layer restores the full transfer
    removed = next(layer_matrix(l, 8) for l, t
                   in zip(net.layers, net.level_tags) if t == red.removed_tag)
    assert rec @ removed == ExactMatrix.identity(8)


def test_cancel_layer_rejects_unequal_angles():
    net = build_network(2)
    with pytest.raises(ValueError, match="offending pair"):
        cancel_layer(net, [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7])


def test_network_json_roundtrip_fields():
    doc = json.loads(build_network(2).to_json())
    assert doc["n_modes"] == 8
    tags = [layer["tag"] for layer in doc["layers"]]
    assert tags == ["DRL", "QRL", "ORL"]
    assert all(len(layer["pairs"]) == 4 for layer in doc["layers"])
