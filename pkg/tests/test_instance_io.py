from itertools import product

import numpy as np
import pytest

from treeopt.core.errors import InstanceFormatError, InstanceValidationError
from treeopt.schemas.instance import Constraint, Instance
from treeopt.services.instance_io import (
    evaluate,
    evaluate_batch,
    fits_int64,
    generate_random,
    parse_instance,
    sweep_instance,
    sweep_params,
    write_instance,
)


class TestParseInstance:
    def test_example(self, example):
        assert example.n == 7
        assert example.m == 4
        assert example.c == (2, 3, 1, 5, 4, 6, 1)
        first = example.constraints[0]
        assert first.support == (0, 1, 2)
        assert first.coeffs == (3, 4, 1)
        assert first.rhs == 6

    def test_terms_are_sorted_by_index(self):
        inst = parse_instance("n 3\nm 1\nobj 1 1 1\ncon 3:5 1:2 <= 4\n")
        assert inst.constraints[0].support == (0, 2)
        assert inst.constraints[0].coeffs == (2, 5)

    def test_comments_and_blank_lines(self):
        inst = parse_instance("# header\n\nn 2   # vars\nm 0\n\nobj 1 -1\n")
        assert inst.n == 2
        assert inst.m == 0
        assert inst.c == (1, -1)

    def test_accepts_stream(self, example_file, example):
        with open(example_file) as f:
            assert parse_instance(f) == example

    @pytest.mark.parametrize(
        "text, line, fragment",
        [
            ("n 7\nm 1\nobj 1 1 1 1 1 1 1\ncon 9:1 <= 3\n", 4, "variable 9 out of range 1..7"),
            ("n 3\nm 1\nobj 1 1 1\ncon 1:1 1:2 <= 3\n", 4, "duplicate variable 1"),
            ("n 3\nm 1\nobj 1 1 1\ncon 1:1 2:2 3\n", 4, "missing '<='"),
            ("n 3\nm 1\nobj 1 1 1\ncon <= 3\n", 4, "empty support"),
            ("n 3\nm 0\nobj 1 1\n", 3, "expected 3"),
            ("obj 1 1\nn 2\nm 0\n", 1, "'obj' before 'n'"),
            ("n 2\ncon 1:1 <= 1\n", 2, "'con' before"),
            ("n 2\nn 3\n", 2, "duplicate 'n'"),
            ("n 2\nm 0\nobj 1 1\nvar 3\n", 4, "unknown keyword"),
            ("n 2\nm 2\nobj 1 1\ncon 1:1 <= 1\n", 4, "found 1 constraints, expected m=2"),
            ("n 2\nm 1\nobj 1 1\ncon 1:x <= 1\n", 4, "expected integer coefficient"),
            ("n 2\nm 1\nobj 1 1\ncon 1:1 <= 1\ncon 2:1 <= 1\n", 5, "more than m=1"),
        ],
    )
    def test_malformed(self, text, line, fragment):
        with pytest.raises(InstanceFormatError) as exc_info:
            parse_instance(text)
        assert exc_info.value.line == line
        assert fragment in str(exc_info.value)
        assert str(exc_info.value).startswith(f"line {line}:")

    def test_format_error_is_a_value_error(self):
        with pytest.raises(ValueError):
            parse_instance("n 0\n")


class TestWriteInstance:
    def test_canonical_text(self, example):
        text = write_instance(example)
        assert text.splitlines()[:4] == [
            "n 7",
            "m 4",
            "obj 2 3 1 5 4 6 1",
            "con 1:3 2:4 3:1 <= 6",
        ]

    def test_parses_back(self, example):
        assert parse_instance(write_instance(example)) == example

    @pytest.mark.parametrize("seed", range(30))
    def test_generated_instances_parse_back(self, seed):
        for inst in (generate_random(9, 7, 3, (0, 5), seed=seed), sweep_instance(seed, n_max=16)):
            assert parse_instance(write_instance(inst)) == inst


class TestEvaluate:
    def test_example_optimum(self, example):
        assert evaluate(example, (1, 0, 0, 1, 1, 1, 1)) == (18, True)

    def test_all_zeros_feasible(self, example):
        assert evaluate(example, [0] * 7) == (0, True)

    def test_all_ones_infeasible(self, example):
        assert evaluate(example, [1] * 7) == (22, False)

    def test_mapping(self, example):
        values = dict(enumerate((1, 0, 0, 1, 1, 1, 1)))
        assert evaluate(example, values) == (18, True)

    def test_partial_mapping_rejected(self, example):
        with pytest.raises(InstanceValidationError, match="variable 7 is unset"):
            evaluate(example, {j: 0 for j in range(6)})

    def test_wrong_length_rejected(self, example):
        with pytest.raises(InstanceValidationError):
            evaluate(example, [0, 1])

    def test_non_binary_rejected(self, example):
        with pytest.raises(InstanceValidationError, match="non-binary"):
            evaluate(example, [0, 0, 2, 0, 0, 0, 0])

    def test_batch_matches_scalar(self, example):
        X = np.array(list(product((0, 1), repeat=example.n)))
        objectives, feasible = evaluate_batch(example, X)
        for row, z, ok in zip(X, objectives, feasible):
            assert evaluate(example, row.tolist()) == (int(z), bool(ok))

    def test_batch_without_constraints(self):
        inst = Instance(n=2, c=(1, 2))
        objectives, feasible = evaluate_batch(inst, np.array([[0, 0], [1, 1]]))
        assert objectives.tolist() == [0, 3]
        assert feasible.tolist() == [True, True]

    def test_huge_coefficients_do_not_fit_int64(self):
        inst = Instance(n=1, c=(2**63,))
        assert not fits_int64(inst)
        with pytest.raises(InstanceValidationError):
            evaluate_batch(inst, np.array([[1]]))


class TestGenerateRandom:
    def test_deterministic(self):
        assert generate_random(10, 6, 3, (1, 9), seed=7) == generate_random(10, 6, 3, (1, 9), seed=7)

    @pytest.mark.parametrize("seed", range(20))
    def test_shape(self, seed):
        inst = generate_random(12, 8, 4, (2, 5), seed=seed)
        assert inst.n == 12
        assert inst.m == 8
        assert all(2 <= cj <= 5 for cj in inst.c)
        for con in inst.constraints:
            assert 1 <= len(con.support) <= 4
            assert all(2 <= a <= 5 for a in con.coeffs)
            assert max(con.coeffs) <= con.rhs <= sum(con.coeffs)

    @pytest.mark.parametrize(
        "args",
        [
            (3, 1, 4, (1, 9)),  # support larger than n
            (3, 1, 2, (5, 1)),  # empty range
            (0, 1, 1, (1, 9)),
            (3, -1, 1, (1, 9)),
        ],
    )
    def test_invalid_parameters(self, args):
        with pytest.raises(InstanceValidationError):
            generate_random(*args, seed=0)

    def test_sweep_params_bounds(self):
        for seed in range(200):
            p = sweep_params(seed, n_max=16)
            assert 1 <= p.n <= 16
            assert 0 <= p.m <= 12
            assert 1 <= p.max_support <= min(4, p.n)


def test_constraint_rejects_unsorted_support():
    with pytest.raises(ValueError):
        Constraint(support=(2, 1), coeffs=(1, 1), rhs=1)


def test_instance_rejects_out_of_range_variable():
    with pytest.raises(ValueError):
        Instance(n=2, c=(1, 1), constraints=(Constraint(support=(0, 2), coeffs=(1, 1), rhs=1),))
