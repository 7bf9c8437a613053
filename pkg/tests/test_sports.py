import pytest

from combench import sports
from combench.sports import SportsInstance, Timetable


@pytest.mark.parametrize("n", range(2, 31, 2))
def test_circle_method_is_phased_2rr(n):
    tt = sports.circle_method(n)
    assert len(tt.slots) == 2 * (n - 1)
    assert sports.validate(tt, SportsInstance(n)).feasible


def test_break_counts():
    assert sports.count_breaks(sports.circle_method(6)) == 12


def test_break_defined_against_previous_slot():
    tt = sports.circle_method(4)
    v = sports._View(tt)
    assert not any(v.is_break(t, 0) for t in range(4))


def test_structure_errors():
    tt = sports.circle_method(4)
    short = Timetable(4, tt.slots[:-1])
    assert [v.constraint_id for v in sports.validate(short, SportsInstance(4)).violations][0] == "2RR"
    reordered = Timetable(4, (tt.slots[0], tt.slots[3]) + tt.slots[1:3] + tt.slots[4:])
    ids = {v.constraint_id for v in sports.validate(reordered, SportsInstance(4)).violations}
    assert ids == {"PHASED"}
    assert sports.validate(reordered, SportsInstance(4, phased=False)).feasible


def test_constraints_skipped_when_structure_broken():
    tt = Timetable(4, sports.circle_method(4).slots[:-1])
    inst = SportsInstance(4, True, (sports.CA1(frozenset({0}), frozenset({0}), max=0),))
    ids = {v.constraint_id for v in sports.validate(tt, inst).violations}
    assert ids == {"2RR"}


def test_consecutive_limit():
    home_three = Timetable(4, (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (2, 1)),
                               ((1, 0), (3, 2)), ((2, 0), (3, 1)), ((3, 0), (1, 2))))
    inst = SportsInstance(4, True, tuple(sports.consecutive_limit(4)))
    ids = {v.constraint_id for v in sports.validate(home_three, inst).violations}
    assert ids == {"CA3[0]", "CA3[1]"}


def test_instance_rejects_out_of_range_refs():
    with pytest.raises(ValueError):
        SportsInstance(4, True, (sports.CA1(frozenset({4}), frozenset({0}), 1),))
    with pytest.raises(ValueError):
        SportsInstance(5)


ROBINX = """<Instance>
  <Resources><Teams>{teams}</Teams></Resources>
  <Structure><Format><numberRoundRobin>2</numberRoundRobin><gameMode>{mode}</gameMode></Format></Structure>
  <Constraints>
    <CapacityConstraints>
      <CA1 teams="0" slots="0;1" max="1" mode="H" type="HARD"/>
      <CA3 teams1="0;1;2;3" teams2="0;1;2;3" max="2" intp="3" mode1="H" type="SOFT"/>
    </CapacityConstraints>
    <BreakConstraints><BR2 teams="0;1;2;3" slots="0;1;2;3;4;5" intp="12" type="HARD"/></BreakConstraints>
  </Constraints>
</Instance>"""


def _doc(mode="P"):
    return ROBINX.format(teams="".join(f'<team id="{i}"/>' for i in range(4)), mode=mode)


def test_parse_robinx_drops_soft_with_warning():
    with pytest.warns(UserWarning):
        inst = sports.parse_robinx(_doc())
    assert inst.n == 4 and inst.phased and [c.kind for c in inst.constraints] == ["CA1", "BR2"]
    assert inst.dropped == ("CA3",)
    with pytest.raises(sports.UnsupportedFeature):
        sports.parse_robinx(_doc(), ignore_soft=False)
    with pytest.warns(UserWarning):
        assert not sports.parse_robinx(_doc("NULL")).phased


def test_parse_robinx_unknown_hard_type():
    doc = _doc().replace("<BR2 ", "<XX9 ")
    with pytest.raises(sports.UnsupportedFeature):
        sports.parse_robinx(doc)


def test_robinx_solution_and_text_round_trip():
    tt = sports.circle_method(4)
    xml = "<Solution><Games>" + "".join(
        f'<ScheduledMatch home="{h}" away="{a}" slot="{s}"/>' for s, games in enumerate(tt.slots) for h, a in games
    ) + "</Games></Solution>"
    assert sports.parse_robinx_solution(xml, 4) == tt
    assert sports.read_timetable(sports.write_timetable(tt)) == tt
