import numpy as np
import pytest

from qtemporal.algebra import (
    IDENTITY,
    ZERO,
    Generator,
    OperatorWord,
    adjoint,
    build_basis,
    generators_for,
    multiply,
    reduce_letters,
)

E00 = OperatorWord((Generator(0, 0),))
E10 = OperatorWord((Generator(1, 0),))
E01 = OperatorWord((Generator(0, 1),))


def _rewrite_to_fixpoint(letters: list[Generator]) -> OperatorWord:
    # Naive leftmost rewriting, independent of the stack reducer.
    letters = list(letters)
    changed = True
    while changed:
        changed = False
        for idx in range(len(letters) - 1):
            left, right = letters[idx], letters[idx + 1]
            if left.setting != right.setting:
                continue
            if left.outcome != right.outcome:
                return ZERO
            del letters[idx + 1]
            changed = True
            break
    return OperatorWord(tuple(letters))


def _random_letters(rng: np.random.Generator, alphabet: tuple[Generator, ...]) -> list[Generator]:
    length = int(rng.integers(0, 13))
    return [alphabet[int(i)] for i in rng.integers(0, len(alphabet), size=length)]


def _reduce_bracketed(rng: np.random.Generator, letters: list[Generator]) -> OperatorWord:
    if len(letters) <= 1:
        return reduce_letters(letters)
    cut = int(rng.integers(1, len(letters)))
    return multiply(_reduce_bracketed(rng, letters[:cut]), _reduce_bracketed(rng, letters[cut:]))


def _random_word(rng: np.random.Generator, alphabet: tuple[Generator, ...]) -> OperatorWord:
    return reduce_letters(_random_letters(rng, alphabet))


def test_multiply_identity_idempotence_orthogonality() -> None:
    assert multiply(IDENTITY, E00) == E00
    assert multiply(E00, E00) == E00
    assert multiply(E00, E10).is_zero
    assert multiply(ZERO, E00) is ZERO
    assert multiply(E01, ZERO).is_zero


def test_adjoint_examples() -> None:
    word = multiply(E00, E01)
    assert adjoint(word) == multiply(E01, E00)
    assert adjoint(IDENTITY) == IDENTITY
    assert adjoint(E00) == E00
    assert adjoint(ZERO).is_zero


def test_generators_exclude_last_outcome() -> None:
    gens = generators_for(3, 2)
    assert gens == (Generator(0, 0), Generator(1, 0), Generator(0, 1), Generator(1, 1))
    with pytest.raises(ValueError):
        generators_for(1, 2)
    assert all(g.n_outcomes == 3 for g in gens)


def test_generator_rejects_the_last_outcome() -> None:
    with pytest.raises(ValueError, match="last outcome"):
        Generator(outcome=1, setting=0, n_outcomes=2)
    with pytest.raises(ValueError, match="last outcome"):
        Generator(outcome=4, setting=1, n_outcomes=3)
    with pytest.raises(ValueError):
        Generator(outcome=-1, setting=0)

    bound = Generator(outcome=0, setting=0, n_outcomes=2)
    assert bound == Generator(0, 0)
    assert hash(bound) == hash(Generator(0, 0))


def test_reduction_is_confluent_over_random_bracketings() -> None:
    rng = np.random.default_rng(20240501)
    alphabet = generators_for(3, 3)
    for _ in range(10_000):
        letters = _random_letters(rng, alphabet)
        expected = _rewrite_to_fixpoint(letters)
        assert reduce_letters(letters) == expected
        assert _reduce_bracketed(rng, letters) == expected


def test_multiply_is_associative_and_adjoint_laws_hold() -> None:
    rng = np.random.default_rng(7)
    alphabet = generators_for(3, 2)
    for _ in range(10_000):
        u, v, w = (_random_word(rng, alphabet) for _ in range(3))
        assert multiply(multiply(u, v), w) == multiply(u, multiply(v, w))
        assert adjoint(adjoint(u)) == u
        assert adjoint(multiply(u, v)) == multiply(adjoint(v), adjoint(u))


def test_basis_two_dichotomic_settings_level_one() -> None:
    basis = build_basis(generators_for(2, 2), 1)
    assert basis.words == (IDENTITY, E00, E01)
    assert basis.index(E01) == 2


@pytest.mark.parametrize("level", [1, 2, 3, 4, 5, 6])
def test_basis_size_two_dichotomic_settings(level: int) -> None:
    basis = build_basis(generators_for(2, 2), level)
    assert len(basis) == 1 + 2 * level
    assert basis.words[0] == IDENTITY
    assert all(len(a) <= len(b) for a, b in zip(basis.words, basis.words[1:]))


def test_basis_three_dichotomic_settings_level_one() -> None:
    basis = build_basis(generators_for(2, 3), 1)
    assert len(basis) == 4
    assert basis.generators == generators_for(2, 3)


def test_basis_words_are_canonical_and_distinct() -> None:
    basis = build_basis(generators_for(3, 2), 3)
    assert len(set(basis.words)) == len(basis)
    for word in basis.words:
        assert not word.is_zero
        assert reduce_letters(word.letters) == word


def test_basis_rejects_level_zero_and_empty_generators() -> None:
    with pytest.raises(ValueError):
        build_basis(generators_for(2, 2), 0)
    with pytest.raises(ValueError):
        build_basis([], 1)
