"""Command line front end of the Navier-Stokes module."""

from typing import Optional

from seriesflow.core.io import Document, read_document, write_document
from seriesflow.core.prints import print_reports
from seriesflow.core.registry import command
from seriesflow.core.series import Backend, parse_scalar
from seriesflow.modules.navier_stokes import flow as ns
from seriesflow.util.classes import Config, ScalarArg
from seriesflow.util.constants import EXIT_OK, EXIT_VERIFICATION_FAILED
from seriesflow.util.misc import InvalidParameter, get_logger

log = get_logger(__name__)

FLOW_KIND = "navier-stokes-flow"
FIELDS = ("u", "v", "w", "P")

CONFIG = [
    Config("navier_stokes.rho", default=1, description="Density"),
    Config("navier_stokes.nu", default="1/10", description="Kinematic viscosity")
]


def _flow_document(flow: ns.FlowSeries, metadata: dict) -> Document:
    return Document(FLOW_KIND, flow.backend, dict(zip(FIELDS, (flow.u, flow.v, flow.w, flow.pressure))),
                    {"rho": flow.rho, "nu": flow.nu, **metadata})


def _constant(name: str, given: Optional[str], document: Document):
    text = given if given is not None else document.metadata.get(name)
    if text is None:
        raise InvalidParameter(f"The document does not record {name}; give it with --{name}.")
    return parse_scalar(str(text), document.backend)


def _read_flow(path: str, rho: Optional[str], nu: Optional[str]) -> ns.FlowSeries:
    document = read_document(path)
    u, v, w, p = (document.require(name) for name in FIELDS)
    return ns.FlowSeries(u, v, w, p, _constant("rho", rho, document), _constant("nu", nu, document))


@command("ns-taylor-green", description="Write the series of the Taylor-Green vortex", config=CONFIG)
def ns_taylor_green(order: int, time_order: Optional[int] = None, rho: ScalarArg = Config("navier_stokes.rho"),
                    nu: ScalarArg = Config("navier_stokes.nu"), backend: Backend = Config("backend.default"),
                    out: Optional[str] = None):
    flow = ns.taylor_green(order, nu, rho, backend, time_order)
    write_document(_flow_document(flow, {"source": "taylor-green", "order": order,
                                         "time_order": order if time_order is None else time_order}), out)
    return EXIT_OK


@command("ns-verify", description="Substitute a flow into the momentum and continuity equations")
def ns_verify(doc: str, rho: Optional[ScalarArg] = None, nu: Optional[ScalarArg] = None,
              tolerance: float = Config("verify.float_tolerance"), out: Optional[str] = None):
    """Exit with status 2 when any of the four residuals is nonzero within its trustworthy order."""
    flow = _read_flow(doc, rho, nu)
    report = ns.verify(flow, tolerance)
    print_reports(f"Navier-Stokes residuals of {doc}", report.reports)
    for r in report.reports:
        if not r.conclusive:
            log.warning("%s: the caps leave no trustworthy residual coefficient", r.label)
    if out:
        fields = {r.label: r.residual for r in report.reports if r.residual is not None}
        verdict = {"passed": report.passed,
                   "equations": [r.as_dict() for r in report.reports]}
        write_document(Document("navier-stokes-residual", flow.backend, fields,
                                {"source": doc, "rho": flow.rho, "nu": flow.nu}, verdict), out)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


@command("ns-march", description="Generate time levels from initial velocity and a prescribed pressure")
def ns_march(doc: str, steps: int, rho: Optional[ScalarArg] = None, nu: Optional[ScalarArg] = None,
             out: Optional[str] = None):
    """Read u, v, w at t = 0 and the pressure P from a flow document and write the marched flow."""
    document = read_document(doc)
    u, v, w, p = (document.require(name) for name in FIELDS)
    flow = ns.time_march(u, v, w, p, steps, _constant("rho", rho, document), _constant("nu", nu, document))
    log.info("Marched %d time levels, caps %s", steps, flow.caps)
    write_document(_flow_document(flow, {"source": "march", "initial": doc, "steps": steps}), out)
    return EXIT_OK
