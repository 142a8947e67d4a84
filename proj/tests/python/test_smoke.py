import pcprobe


V4 = "group 4.2\ngens 2\norders 2 2\n"
HEIS27 = (
    "group 27.3\n"
    "gens 3\n"
    "orders 3 3 3\n"
    "conj 2 1 = g2 g3\n"
)


def test_parse_and_roundtrip():
    p = pcprobe.parse(V4)
    assert p.n == 2
    assert p.order() == 4
    assert pcprobe.parse(pcprobe.serialize(p)).order() == 4


def test_parse_error():
    try:
        pcprobe.parse("gens -1\n")
    except pcprobe.PcParseError:
        pass
    else:
        raise AssertionError("expected PcParseError")


def test_collect_and_arithmetic():
    p = pcprobe.parse(HEIS27)
    assert pcprobe.is_consistent(p)
    # g2 * g1 collects to g1 g2 g3 under the commutation relation.
    assert pcprobe.collect(p, [(2, 1), (1, 1)]) == [1, 1, 1]
    a = pcprobe.collect(p, [(1, 1)])
    b = pcprobe.collect(p, [(2, 1)])
    assert pcprobe.commutator(p, a, b) == [0, 0, 2]
    assert pcprobe.element_order(p, a) == 3
    assert pcprobe.multiply(p, a, pcprobe.inverse(p, a)) == [0, 0, 0]


def test_multiplier_and_oracle_agree():
    p = pcprobe.parse(HEIS27)
    assert pcprobe.schur_multiplier(p) == ["3", "3"]
    assert pcprobe.h2_bar_oracle(p) == ["3", "3"]


def test_toral_and_genus2():
    p = pcprobe.parse(HEIS27)
    mult_order, toral_order, generated = pcprobe.toral_subgroup(p)
    assert (mult_order, toral_order, generated) == ("9", "9", True)
    order, gen2 = pcprobe.genus2_subgroup(p, seed=1)
    assert (order, gen2) == ("9", True)
    assert pcprobe.bogomolov(p) == []


def test_verdict_and_covering_genus():
    v = pcprobe.verdict(pcprobe.parse(V4))
    assert v["kind"] == "AllExtendNonsingularly"
    assert v["multiplier_order"] == "2"
    assert v["toral_generated"] is True
    assert pcprobe.count_involutions(pcprobe.parse(V4)) == 3
    assert pcprobe.covering_genus(243, 2) == 244
