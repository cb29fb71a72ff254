"""HTTP service: edge queries, metrics, coreference reports and the
pattern-learning session API consumed by the workbench front end.

All payloads are JSON carrying edges as notation strings.  Malformed
notation yields 400, missing resources 404, and session-consistency
violations (bad assignments, contradictory feedback, impossible
refinements) 409.
"""

from __future__ import annotations

import hashlib

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from hedges.config import Config
from hedges.coref import assign_seed, coref_sets
from hedges.edges import (
    Atom,
    Hyperedge,
    NotationError,
    TypeViolation,
    parse_notation,
    to_string,
)
from hedges.inference import edge_text
from hedges.learning import (
    RefinementError,
    SessionStore,
    assign_variable,
    give_feedback,
    mine_patterns,
    new_session,
    session_matches,
)
from hedges.patterns import match, parse_pattern, pattern_to_string
from hedges.store import Store


def edge_id(edge: Hyperedge) -> str:
    return hashlib.sha1(to_string(edge).encode("utf-8")).hexdigest()[:16]


def _parse_or_400(text: str) -> Hyperedge:
    try:
        return parse_notation(text)
    except (NotationError, TypeViolation) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


class SessionRequest(BaseModel):
    criterion: str = "random"
    seed: int | None = None


class AssignRequest(BaseModel):
    variable: str
    subedge: str


class FeedbackRequest(BaseModel):
    edge: str
    verdict: str


def create_app(config: Config | None = None, store: Store | None = None
               ) -> FastAPI:
    config = config or Config()
    if store is None:
        store = Store.load(config.store) if config.store else Store()
    sidecar = f"{config.store}.sessions.json" if config.store else None
    sessions = SessionStore(sidecar)
    app = FastAPI(title="hedges", version="0.1.0")
    app.state.store = store
    app.state.sessions = sessions
    app.state.config = config

    def edge_payload(edge: Hyperedge) -> dict:
        return {"id": edge_id(edge), "edge": to_string(edge),
                "text": edge_text(edge, store)}

    def session_payload(session) -> dict:
        payload = session.to_json()
        payload["pattern"] = " & ".join(pattern_to_string(p)
                                        for p in session.patterns)
        payload["candidate_text"] = edge_text(session.candidate, store)
        payload["matches"] = [
            {**edge_payload(edge), "status": status}
            for edge, status in session_matches(session, store)]
        return payload

    def get_session_or_404(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404,
                                detail=f"no session {session_id}")
        return session

    @app.get("/edges")
    def list_edges(query: str | None = None):
        edges = sorted(store.edges(), key=to_string)
        if query:
            try:
                pattern = parse_pattern(query)
            except NotationError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            edges = [e for e in edges if match(e, pattern)]
        return {"edges": [edge_payload(e) for e in edges]}

    @app.get("/edges/{eid}")
    def get_edge(eid: str):
        for edge in store.edges():
            if edge_id(edge) == eid:
                attrs = store.attributes(edge)
                return {**edge_payload(edge),
                        "count": attrs.count,
                        "degree": store.degree(edge),
                        "deep_degree": store.deep_degree(edge)}
        raise HTTPException(status_code=404, detail=f"no edge {eid}")

    @app.get("/metrics")
    def metrics(edge: str):
        value = _parse_or_400(edge)
        return {"edge": to_string(value),
                "degree": store.degree(value),
                "deep_degree": store.deep_degree(value),
                "neighborhood": len(store.neighborhood(value))}

    @app.get("/coref/{seed:path}")
    def coref(seed: str):
        atom = _parse_or_400(seed)
        if not isinstance(atom, Atom):
            raise HTTPException(status_code=400,
                                detail="seed must be an atom")
        sets = coref_sets(store, atom)
        assignment = assign_seed(store, atom, sets, config.theta,
                                 config.theta_prime)
        return {
            "seed": to_string(atom),
            "sets": [{"members": [to_string(m) for m in s.members],
                      "texts": [edge_text(m, store) for m in s.members],
                      "total_degree": s.total_degree,
                      "p": s.p,
                      "label": to_string(s.label)} for s in sets],
            "assigned": to_string(assignment.assigned.label)
            if assignment.assigned else None,
            "p": assignment.p,
            "ratio": assignment.ratio,
        }

    @app.get("/patterns/mined")
    def mined(top: int = 50):
        ranked = mine_patterns(store)[:top]
        return {"patterns": [{"pattern": pattern_to_string(p), "count": n}
                             for p, n in ranked]}

    @app.post("/sessions")
    def create_session(request: SessionRequest):
        try:
            session = new_session(store, request.criterion, request.seed)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        sessions.add(session)
        return session_payload(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_payload(get_session_or_404(session_id))

    @app.get("/sessions/{session_id}/pattern")
    def get_pattern(session_id: str):
        session = get_session_or_404(session_id)
        return {"patterns": [pattern_to_string(p) for p in session.patterns],
                "pattern": " & ".join(pattern_to_string(p)
                                      for p in session.patterns)}

    @app.post("/sessions/{session_id}/assign")
    def assign(session_id: str, request: AssignRequest):
        session = get_session_or_404(session_id)
        subedge = _parse_or_400(request.subedge)
        try:
            assign_variable(session, request.variable, subedge)
        except ValueError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        sessions.add(session)
        return session_payload(session)

    @app.post("/sessions/{session_id}/feedback")
    def feedback(session_id: str, request: FeedbackRequest):
        session = get_session_or_404(session_id)
        edge = _parse_or_400(request.edge)
        try:
            give_feedback(session, store, edge, request.verdict)
        except RefinementError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        sessions.add(session)
        return session_payload(session)

    return app
