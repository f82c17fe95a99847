"""
Conformance report model.
"""

import json
from enum import Enum
from typing import Dict, Iterable, List, Optional


class CheckStatus(Enum):
    """Outcome of checking one GET route."""
    PASS = "pass"
    FAIL_HTTP = "fail-http"
    FAIL_SCHEMA = "fail-schema"
    SKIP_EMPTY = "skip-empty"
    SKIP_PARAMS = "skip-params"

    @property
    def is_failure(self) -> bool:
        return self in (CheckStatus.FAIL_HTTP, CheckStatus.FAIL_SCHEMA)


class RouteResult:
    """
    Result of checking one route.

    Attributes:
        route: Route template (e.g. /regions/{id})
        status: Check outcome
        detail: Human readable explanation
        url: Concrete URL requested, if any
        field: Offending field path for schema failures
    """

    def __init__(
        self,
        route: str,
        status: CheckStatus,
        detail: str = "",
        url: Optional[str] = None,
        field: Optional[str] = None
    ):
        self.route = route
        self.status = status
        self.detail = detail
        self.url = url
        self.field = field

    def to_dict(self) -> Dict[str, Optional[str]]:
        data = {
            "route": self.route,
            "status": self.status.value,
            "detail": self.detail,
        }
        if self.url:
            data["url"] = self.url
        if self.field:
            data["field"] = self.field
        return data

    def __repr__(self) -> str:
        return f"RouteResult(route='{self.route}', status='{self.status.value}')"


class ConformanceReport:
    """
    Per-route results of a conformance run, one entry per GET route.
    """

    def __init__(self, results: Optional[Iterable[RouteResult]] = None):
        self.results: List[RouteResult] = []
        for result in results or ():
            self.add(result)

    def add(self, result: RouteResult):
        """
        Add a route result.

        Raises:
            ValueError: If the route already has a result
        """
        if any(r.route == result.route for r in self.results):
            raise ValueError(f"Route already reported: {result.route}")
        self.results.append(result)

    def sorted_results(self) -> List[RouteResult]:
        return sorted(self.results, key=lambda r: r.route)

    def totals(self) -> Dict[str, int]:
        """Count of results per status, every status present."""
        counts = {status.value: 0 for status in CheckStatus}
        for result in self.results:
            counts[result.status.value] += 1
        counts["total"] = len(self.results)
        return counts

    @property
    def failed(self) -> bool:
        return any(r.status.is_failure for r in self.results)

    def failures(self) -> List[RouteResult]:
        return [r for r in self.sorted_results() if r.status.is_failure]

    def to_json_lines(self) -> str:
        """One JSON object per route, then a totals line."""
        lines = [json.dumps(r.to_dict(), sort_keys=True) for r in self.sorted_results()]
        lines.append(json.dumps({"totals": self.totals()}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def render_table(self) -> str:
        """Fixed-width summary table for terminals."""
        rows = [(r.route, r.status.value, r.detail) for r in self.sorted_results()]
        route_width = max([len("ROUTE")] + [len(row[0]) for row in rows])
        status_width = max([len("STATUS")] + [len(row[1]) for row in rows])

        lines = [f"{'ROUTE'.ljust(route_width)}  {'STATUS'.ljust(status_width)}  DETAIL"]
        for route, status, detail in rows:
            lines.append(f"{route.ljust(route_width)}  {status.ljust(status_width)}  {detail}")

        totals = self.totals()
        summary = ", ".join(f"{status.value}={totals[status.value]}" for status in CheckStatus)
        lines.append("")
        lines.append(f"{totals['total']} routes: {summary}")
        return "\n".join(lines) + "\n"
