import json

import numpy as np
import pytest

from qtemporal.algebra import IDENTITY, Generator, OperatorWord
from qtemporal.core.errors import InvalidCorrelationTableError, InvalidScenarioError
from qtemporal.moment import (
    CHSH_SCENARIO,
    CorrelationTable,
    EntryRef,
    Scenario,
    bind_data,
    build_model,
    chsh_coefficients,
    chsh_value,
    deterministic_table,
    functional,
    normalization,
    nsit_constraints,
    word_functional,
)
from qtemporal.moment.schemas import dump_table, load_table
from qtemporal.realizations.reference import qrac_scenario

E00 = OperatorWord((Generator(0, 0),))
E01 = OperatorWord((Generator(0, 1),))


@pytest.mark.parametrize(
    ("scenario", "level", "per_block"),
    [
        (CHSH_SCENARIO, 1, 5),
        (CHSH_SCENARIO, 2, 9),
        (CHSH_SCENARIO, 5, 21),
        (qrac_scenario(2), 2, 9),
        (qrac_scenario(3), 1, 10),
    ],
)
def test_variable_counts(scenario: Scenario, level: int, per_block: int) -> None:
    model = build_model(scenario, level)
    assert all(block.n_vars == per_block for block in model.blocks)
    assert model.n_vars == per_block * scenario.nA * scenario.nX


def test_blocks_use_disjoint_variables() -> None:
    model = build_model(CHSH_SCENARIO, 2)
    seen: set[int] = set()
    for block in model.blocks:
        ids = set(block.var_ids)
        assert not ids & seen
        seen |= ids
    assert seen == set(range(model.n_vars))


def test_block_order_and_symbolic_layout() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    assert [block.label for block in model.blocks] == [(0, 0), (1, 0), (0, 1), (1, 1)]

    table = model.block(0, 0).symbolic()
    assert table[0][0] == "v0"
    assert table[1][0] == "v1"
    assert table[2][0] == "v2"
    assert table[2][1] == "(v3+i*v4)"
    assert table[1][2] == "conj(v3+i*v4)"


def test_coefficient_matrices_are_hermitian() -> None:
    model = build_model(CHSH_SCENARIO, 2)
    ids, coefficients = model.block(1, 1).coefficient_matrices()
    assert len(ids) == coefficients.shape[0]
    for matrix in coefficients:
        assert np.allclose(matrix, matrix.conj().T)


def test_entry_bindings() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    assert model.binding(EntryRef((1, 0), 0, 0)).role == "marginal"

    joint = model.binding(EntryRef((0, 1), 2, 0))
    assert (joint.role, joint.a, joint.x, joint.b, joint.y) == ("joint", 0, 1, 0, 1)

    assert model.binding(EntryRef((0, 0), 2, 1)).role == "unknown"


def test_orthogonal_outcomes_give_zero_entries() -> None:
    model = build_model(Scenario(nA=1, nX=1, nB=3, nY=1), 1)
    # basis: 1, E_{0|0}, E_{1|0}
    assert model.binding(EntryRef((0, 0), 1, 2)).role == "zero"
    assert model.block(0, 0).entry_expr(1, 2) == {}


def test_last_outcome_is_marginal_minus_the_rest() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    last = model.probability_expr(0, 1, 0, 1)
    marginal = model.marginal_expr(0, 0)
    first = model.probability_expr(0, 0, 0, 1)
    for vid in set(last) | set(marginal) | set(first):
        assert last.get(vid, 0.0) == pytest.approx(marginal.get(vid, 0.0) - first.get(vid, 0.0))


def test_word_outside_level_is_rejected() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    with pytest.raises(InvalidScenarioError):
        model.block(0, 0).word_expr(E00 * E01 * E00)
    with pytest.raises(InvalidScenarioError):
        model.block(2, 0)


def test_normalization_counts() -> None:
    assert len(normalization(build_model(CHSH_SCENARIO, 1))) == 2

    prepared = normalization(build_model(qrac_scenario(2), 1))
    assert len(prepared) == 4
    assert all(eq.rhs == pytest.approx(0.5) for eq in prepared)


def test_nsit_constraints_pair_every_variable() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    equalities = nsit_constraints(model)
    assert len(equalities) == 5
    for eq in equalities:
        assert sorted(eq.coefficients.values()) == [-1.0, -1.0, 1.0, 1.0]


def test_bind_data_counts_and_values() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    table = deterministic_table(CHSH_SCENARIO, first=(0, 1), second=(1, 0))
    equalities = bind_data(model, table)
    assert len(equalities) == 12
    rhs = {eq.name: eq.rhs for eq in equalities}
    assert rhs["P(1|1)"] == pytest.approx(1.0)
    assert rhs["P(0|1)"] == pytest.approx(0.0)
    assert rhs["P(0,0|0,1)"] == pytest.approx(1.0)
    assert rhs["P(0,0|0,0)"] == pytest.approx(0.0)


def test_bind_data_rejects_mismatched_tables() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    other = CorrelationTable.uniform(Scenario(nA=2, nX=3, nB=2, nY=2))
    with pytest.raises(InvalidCorrelationTableError):
        bind_data(model, other)


def test_deterministic_tables_are_classical() -> None:
    values = []
    for first in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        for second in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            table = deterministic_table(CHSH_SCENARIO, first, second)
            table.validate()
            values.append(chsh_value(table))
    assert max(values) == pytest.approx(2.0)
    assert min(values) == pytest.approx(-2.0)


def test_chsh_coefficients_convention() -> None:
    coefficients = chsh_coefficients()
    assert coefficients[(0, 0, 1, 1)] == -1.0
    assert coefficients[(0, 1, 1, 1)] == 1.0
    assert coefficients[(1, 1, 0, 1)] == 1.0
    assert chsh_value(CorrelationTable.uniform(CHSH_SCENARIO)) == pytest.approx(0.0)


def test_table_validation_failures() -> None:
    values = np.full(CHSH_SCENARIO.shape, 0.25)
    values[0, 0, 0, 0] = 0.5
    values[1, 0, 0, 0] = 0.0
    with pytest.raises(InvalidCorrelationTableError, match="Arrow of time"):
        CorrelationTable(CHSH_SCENARIO, values).validate()

    with pytest.raises(InvalidCorrelationTableError, match="Normalization"):
        CorrelationTable(CHSH_SCENARIO, np.full(CHSH_SCENARIO.shape, 0.3)).validate()

    negative = np.full(CHSH_SCENARIO.shape, 0.25)
    negative[0, 0, 1, 1] = -0.25
    negative[0, 1, 1, 1] = 0.75
    with pytest.raises(InvalidCorrelationTableError, match=r"\[0, 1\]"):
        CorrelationTable(CHSH_SCENARIO, negative).validate()

    skewed = deterministic_table(qrac_scenario(2), first=(0, 0), second=(0, 0))
    with pytest.raises(InvalidCorrelationTableError, match="uniform"):
        skewed.validate()


def test_table_shape_and_mixing() -> None:
    with pytest.raises(InvalidCorrelationTableError):
        CorrelationTable(CHSH_SCENARIO, np.zeros((2, 2, 2)))

    point = deterministic_table(CHSH_SCENARIO, (0, 0), (0, 0))
    mixed = point.mix(CorrelationTable.uniform(CHSH_SCENARIO), 0.5)
    mixed.validate()
    assert chsh_value(mixed) == pytest.approx(1.0)


def test_functional_rejects_unknown_entries() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    with pytest.raises(InvalidScenarioError):
        functional(model, {(0, 0, 0, 2): 1.0})


def test_word_functional_takes_real_part() -> None:
    model = build_model(CHSH_SCENARIO, 1)
    block = model.block(0, 0)
    rep = E00 * E01
    real_id, imag_id = block.variables[rep].ids

    objective = word_functional(model, {((0, 0), E01 * E00): 1j}, constant=0.5)
    # Re[i * (re - i im)] = im
    assert objective.coefficients == {imag_id: pytest.approx(1.0)}
    assert objective.constant == 0.5
    assert real_id not in objective.coefficients

    identity = word_functional(model, {((1, 1), IDENTITY): 2.0})
    assert identity.coefficients == {vid: 2.0 for vid in model.marginal_expr(1, 1)}


def test_table_document_round_trip(tmp_path) -> None:
    table = deterministic_table(CHSH_SCENARIO, (1, 0), (0, 1)).mix(CorrelationTable.uniform(CHSH_SCENARIO), 0.3)
    path = tmp_path / "table.json"
    dump_table(table, path)
    loaded = load_table(path)
    assert loaded.scenario == table.scenario
    assert np.array_equal(loaded.values, table.values)
    assert json.loads(path.read_text())["format_version"] == 1


def test_load_table_rejects_bad_documents(tmp_path) -> None:
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"nA": 2, "nX": 2, "nB": 2, "nY": 2, "entries": [[0, 0, 0, 0, 1.0]]}))
    with pytest.raises(InvalidCorrelationTableError):
        load_table(path)

    path.write_text("{not json")
    with pytest.raises(InvalidCorrelationTableError):
        load_table(path)

    with pytest.raises(InvalidCorrelationTableError):
        load_table(tmp_path / "missing.json")
