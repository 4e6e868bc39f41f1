from fractions import Fraction
import itertools

import pytest

import lowdisc


def test_radical_inverse():
    assert lowdisc.radical_inverse(6, 2) == Fraction(3, 8)
    assert lowdisc.radical_inverse(5, 3) == Fraction(7, 9)


def test_generate_halton():
    points = lowdisc.generate("halton:2,3", 3, start=1)
    assert points == [[Fraction(1, 2), Fraction(1, 3)],
                      [Fraction(1, 4), Fraction(2, 3)],
                      [Fraction(3, 4), Fraction(1, 9)]]


def test_distribution_matches_enumeration():
    for q, j in [(2, 5), (3, 4), (5, 3)]:
        counts = [0] * (j * (q - 1) + 1)
        for digits in itertools.product(range(q), repeat=j):
            counts[sum(digits)] += 1
        assert lowdisc.distribution(q, j) == counts


def test_distribution_is_exact_beyond_64_bits():
    counts = lowdisc.distribution(2, 80)
    assert sum(counts) == 2**80
    assert counts[40] == 107507208733336176461620


def test_discrepancy():
    r = lowdisc.discrepancy("vdc:2", 8)
    assert r["value"] == Fraction(1, 8)
    assert lowdisc.discrepancy("halton:2,3", 9)["value"] == Fraction(11, 36)
    star = lowdisc.discrepancy("vdc:2", 16, transform="sod:2", mode="star")
    assert 0 < star["value"] <= 1


def test_transforms():
    assert lowdisc.apply_transform("sod:2", 7) == 3
    assert lowdisc.apply_transform("pow:1/2", 17) == 4
    assert lowdisc.multiplicity("pow:1/2", 3) == 7


def test_weyl_sum():
    assert abs(lowdisc.weyl_sum(2, 2, 0, 100) - 1) < 1e-12
    assert abs(lowdisc.weyl_sum(2, 2, 1, 8)) < 1e-12


def test_hellekalek_constant_sequence():
    assert lowdisc.hellekalek_bound(2, 1, [0, 0, 0], 0) == pytest.approx(1.5)


def test_errors_carry_codes():
    with pytest.raises(lowdisc.LowdiscError, match="invalid-base"):
        lowdisc.radical_inverse(3, 1)


def test_cli():
    code, out, err = lowdisc.run_cli(["dist", "--q", "2", "--j", "3"])
    assert code == 0 and err == ""
    assert out.splitlines()[0].startswith("q,")
    code, _, err = lowdisc.run_cli(["gen", "--spec", "vdc:1", "--N", "4"])
    assert code == 2 and "invalid-base" in err
