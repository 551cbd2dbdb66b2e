from sosplay.emobility import composed_engine, rps_engine, sos_engine
from sosplay.emobility.programs import build_rps_program, build_sos_program, calculate_route, get_location
from sosplay.engine import Engine
from sosplay.events import Event, Message, Mock
from sosplay.runner import engine_names


def prefs(engine, *places):
    return Event(engine.role("user"), engine.role("app"), Message("addTravelPreferences", 2), places)


def test_fixture_registers_engines():
    assert {"sos", "rps", "composed"} <= set(engine_names())


def test_sos_program_shape():
    prog = build_sos_program()
    assert prog.level == "inter"
    assert [d.id for d in prog.definitions] == ["plan-route", "charging-stations"]
    assert all(d.trigger is not None for d in prog.definitions)
    assert {r.name for r in prog.roles} == {"user", "app", "rps", "csos", "bhs", "eis"}
    assert prog.roles["app"].implements("routeRequester")


def test_sos_standalone_requests_route_with_preferences():
    eng = sos_engine()
    eng.inject(prefs(eng, "Dortmund", "Paderborn"))
    eng.run_to_quiescence(100)
    assert 'app -> rps . calculateRoute("Dortmund", "Paderborn")' in [str(e) for e in eng.trace]


def test_no_injection_no_trace():
    eng = sos_engine()
    assert eng.run_to_quiescence(10).events == () and eng.trace == []


def test_rps_standalone_derives_route():
    eng = rps_engine()
    eng.inject(Event(eng.role("routeRequester"), eng.role("rps"), Message("calculateRoute", 2), ("Dortmund", "Paderborn")))
    eng.run_to_quiescence(100)
    assert str(eng.trace[-1]) == "rps -> routeRequester . calculateRouteResponse(mock:route-Dortmund-Paderborn)"


def test_rps_ignores_unrelated_events():
    eng = rps_engine()
    eng.inject(Event(eng.role("rps"), eng.role("routeRequester"), Message("hello"), ()))
    eng.run_to_quiescence(10)
    assert len(eng.trace) == 1 and eng.instances == []


def test_helpers_are_deterministic():
    assert get_location("Dortmund") == Mock("loc-Dortmund")
    assert calculate_route(get_location("A"), get_location("B")) == Mock("route-A-B")


def test_composed_route_is_refined_never_mock():
    eng = composed_engine()
    eng.inject(prefs(eng, "Dortmund", "Paderborn"))
    eng.run_to_quiescence(100)
    (resp,) = [e for e in eng.trace if e.message.name == "calculateRouteResponse"]
    assert resp.params == (Mock("route-Dortmund-Paderborn"),)
    assert resp.receiver.name == "app"


def test_bhs_and_eis_have_no_behavior():
    roles = build_sos_program().roles
    assert "bhs" in roles and "eis" in roles
    assert Engine(build_rps_program(empty=True)).instances == []
