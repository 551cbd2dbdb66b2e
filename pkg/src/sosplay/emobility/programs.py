"""Scenario programs of the e-mobility route-planning example.

SoS level: a user, the smartphone app and four constituent systems (route
planning ``rps``, charging-station operation ``csos``, battery health ``bhs``
and energy information ``eis``).  The RPS internals form one intra-level
program talking to an abstract ``routeRequester``, an interface the app
implements.
"""

from ..composition import Composition, RoleBinding
from ..engine import (
    Before,
    ScenarioDefinition,
    ScenarioProgram,
    Var,
    let,
    request,
    request_flexible,
)
from ..events import ANY, EventPattern, Message, Mock, RoleRegistry

ROUTE_REQUESTER = "routeRequester"
INTER_ROLES = ("user", "app", "rps", "csos", "bhs", "eis")

# SoS-level messages
addTravelPreferences = Message("addTravelPreferences", 2)
calculateRoute = Message("calculateRoute", 2)
calculateRouteResponse = Message("calculateRouteResponse", 1)
optimizeRoute = Message("optimizeRoute", 0)
showMapWithOptimizedRoute = Message("showMapWithOptimizedRoute", 0)
chargingStationGpsDataRequest = Message("chargingStationGpsDataRequest", 0)
considerChargingStationLocations = Message("considerChargingStationLocations", 1)

# RPS-internal messages
getLocations = Message("getLocations", 2)
locations = Message("locations", 2)
calculatedRoute = Message("calculatedRoute", 1)


def create_mock_route():
    return Mock("route")


def create_mock_charging_stations_list():
    return Mock("chargingStationsList")


def get_location(place: str) -> Mock:
    return Mock(f"loc-{place}")


def calculate_route(from_loc: Mock, to_loc: Mock) -> Mock:
    return Mock(f"route-{from_loc.label.removeprefix('loc-')}-{to_loc.label.removeprefix('loc-')}")


def sos_roles() -> RoleRegistry:
    reg = RoleRegistry()
    for name in INTER_ROLES:
        reg.register(name, {ROUTE_REQUESTER} if name == "app" else ())
    return reg


def rps_roles() -> RoleRegistry:
    reg = RoleRegistry()
    for name in ("rps", ROUTE_REQUESTER, "rpsController", "gpsService", "routePlaner"):
        reg.register(name)
    return reg


def build_sos_program(empty: bool = False) -> ScenarioProgram:
    roles = sos_roles()
    prog = ScenarioProgram("inter", roles, name="sos")
    if empty:
        return prog
    user, app, rps, csos = roles["user"], roles["app"], roles["rps"], roles["csos"]
    travel_prefs = EventPattern("user", "app", addTravelPreferences)

    prog.add(
        ScenarioDefinition(
            "plan-route",
            trigger=travel_prefs,
            params=("fromLoc", "toLoc"),
            body=[
                request(app, rps, calculateRoute, Var("fromLoc"), Var("toLoc")),
                let("route", create_mock_route),
                request_flexible(rps, app, calculateRouteResponse, Var("route")),
                request(app, app, optimizeRoute),
                request(app, user, showMapWithOptimizedRoute),
            ],
        )
    )
    prog.add(
        ScenarioDefinition(
            "charging-stations",
            trigger=travel_prefs,
            body=[
                Before(
                    EventPattern("app", "app", optimizeRoute),
                    [
                        request(app, csos, chargingStationGpsDataRequest),
                        let("chargingStationsList", create_mock_charging_stations_list),
                        request_flexible(
                            csos, app, considerChargingStationLocations, Var("chargingStationsList")
                        ),
                    ],
                )
            ],
        )
    )
    return prog


def build_rps_program(empty: bool = False) -> ScenarioProgram:
    roles = rps_roles()
    prog = ScenarioProgram("intra", roles, name="rps")
    if empty:
        return prog
    rps, requester = roles["rps"], roles[ROUTE_REQUESTER]
    controller, gps, planer = roles["rpsController"], roles["gpsService"], roles["routePlaner"]
    prog.add(
        ScenarioDefinition(
            "rps-calculate-route",
            trigger=EventPattern(ROUTE_REQUESTER, "rps", calculateRoute, (ANY, ANY)),
            params=("fromLocString", "toLocString"),
            body=[
                request(controller, gps, getLocations, Var("fromLocString"), Var("toLocString")),
                let("fromLoc", get_location, Var("fromLocString")),
                let("toLoc", get_location, Var("toLocString")),
                request(gps, controller, locations, Var("fromLoc"), Var("toLoc")),
                request(controller, planer, calculateRoute, Var("fromLoc"), Var("toLoc")),
                let("route", calculate_route, Var("fromLoc"), Var("toLoc")),
                request(planer, controller, calculatedRoute, Var("route")),
                # the response leaves the system boundary as rps itself
                request(rps, requester, calculateRouteResponse, Var("route")),
            ],
        )
    )
    return prog


def build_composition(sos=None, rps=None) -> Composition:
    sos = sos or build_sos_program()
    rps = rps if rps is not None else build_rps_program()
    binding = RoleBinding(ROUTE_REQUESTER, sos.roles["app"], rps)
    return Composition(sos, [(rps, "rps")], [binding])
