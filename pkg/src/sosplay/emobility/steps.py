"""Step definitions for the SoS and RPS features."""

from ..gherkin import StepRegistry
from .programs import ROUTE_REQUESTER, calculate_route, get_location

FROM, TO = "Dortmund", "Paderborn"

steps = StepRegistry()


@steps.when(r"^the SoS user adds travel preferences to the app$")
def sos_user_adds_travel_preferences(ctx):
    ctx.trigger(ctx.event("user", "app", "addTravelPreferences", FROM, TO))


@steps.then(r"^the app displays a set of optimized routes$")
def app_displays_optimized_routes(ctx):
    ctx.eventually(ctx.pattern("app", "user", "showMapWithOptimizedRoute"))


@steps.when(r"^the app sends travel preferences to the rps$")
def app_sends_travel_preferences_to_rps(ctx):
    ctx.trigger(ctx.event(ROUTE_REQUESTER, "rps", "calculateRoute", FROM, TO))


@steps.then(r"^the rps responds route information including gps data$")
def rps_responds_route(ctx):
    route = calculate_route(get_location(FROM), get_location(TO))
    ctx.eventually(ctx.pattern("rps", ROUTE_REQUESTER, "calculateRouteResponse", route))
