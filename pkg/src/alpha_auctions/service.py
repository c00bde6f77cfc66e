"""Network service hosting live sessions for browser participants.

Transport: one duplex websocket per participant seat plus idempotent admin
HTTP endpoints.  Every payload is a JSON object with an explicit "kind" tag
(join / state / submit_bid / hypothesize / confirm / revise / feedback /
admin_create / admin_status / error).  Bots are driven server-side; humans
drive their seats over the socket.  No message ever carries another
subject's identity or unconfirmed bid.
"""

from __future__ import annotations

import asyncio
import json
import secrets
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from aiohttp import WSMsgType, web

from .game import DomainError, HV, LV, exact_str
from .session import (
    BotActor,
    BotPolicy,
    LiveSession,
    SessionConfig,
    SessionError,
    session_csv_lines,
)

DEFAULT_TIMEOUT_S = 120.0


# canonical wire form of exact amounts; shared with the engine's views
frac_str = exact_str


def _row_payload(row) -> dict:
    out = {"case": row.case, "possible": row.possible}
    if row.possible:
        out["you_get_item_b"] = row.you_get_item_b
        out["transfer_lo"] = frac_str(row.transfer_lo)
        out["transfer_hi"] = frac_str(row.transfer_hi)
        out["transfer_exact"] = row.transfer_exact
        out["points_lo"] = frac_str(row.points_lo)
        out["points_hi"] = frac_str(row.points_hi)
    return out


@dataclass
class SeatState:
    token: str
    bot: Optional[BotActor] = None
    socket: object = None
    review: Optional[dict] = None
    human: bool = False  # declared human seat; may connect after start


@dataclass
class Hosted:
    session: LiveSession
    seats: dict
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    started: bool = False
    timeout_s: Optional[float] = DEFAULT_TIMEOUT_S
    timers: dict = field(default_factory=dict)
    prev_bids: dict = field(default_factory=lambda: {HV: [], LV: []})
    this_bids: dict = field(default_factory=lambda: {HV: [], LV: []})
    resolved_period: int = 0


class ServiceHost:
    """Registry of hosted sessions and the bot pump."""

    def __init__(self):
        self.sessions: dict = {}

    def create(self, config: SessionConfig, timeout_s=DEFAULT_TIMEOUT_S,
               human_seats=()) -> Hosted:
        if config.session_id in self.sessions:
            raise SessionError(f"session {config.session_id!r} already exists")
        session = LiveSession(config)
        seats = {subject: SeatState(token=secrets.token_hex(8)) for subject in session.subjects}
        for subject in human_seats:
            if int(subject) not in seats:
                raise SessionError(f"no seat {subject}")
            seats[int(subject)].human = True
        hosted = Hosted(session=session, seats=seats, timeout_s=timeout_s)
        self.sessions[config.session_id] = hosted
        return hosted

    def get(self, session_id: str) -> Hosted:
        if session_id not in self.sessions:
            raise SessionError(f"unknown session {session_id!r}")
        return self.sessions[session_id]

    def seat_bots(self, hosted: Hosted, policies: dict):
        children = hosted.session.actor_seed_root.spawn(len(hosted.session.subjects))
        for subject_text, policy_text in policies.items():
            subject = int(subject_text)
            if subject not in hosted.seats:
                raise SessionError(f"no seat {subject}")
            seat = hosted.seats[subject]
            if seat.bot is not None:
                raise SessionError(f"seat {subject} already has a bot")
            if seat.socket is not None:
                raise SessionError(f"seat {subject} is held by a participant")
            policy = BotPolicy.parse(policy_text)
            seat.bot = BotActor(policy, np.random.default_rng(children[subject - 1]))

    def start(self, hosted: Hosted):
        if hosted.started:
            return
        unfilled = [s for s, seat in hosted.seats.items()
                    if seat.bot is None and seat.socket is None and not seat.human]
        if unfilled:
            raise SessionError(f"unseated subjects: {unfilled}")
        hosted.started = True
        hosted.session.start()
        self.pump_bots(hosted)

    def pump_bots(self, hosted: Hosted):
        """Let every bot in the bidding phase submit and confirm; loops until
        only human action (or the session end) remains."""
        session = hosted.session
        changed = True
        while changed and not session.finished:
            changed = False
            for subject, seat in hosted.seats.items():
                if seat.bot is None or session.finished:
                    continue
                st = session._state.get(subject)
                if st is None or st["phase"] != "bidding":
                    continue
                _, role, _ = session._pairs[subject]
                opp_role = HV if role == LV else LV
                bid = seat.bot.choose_bid(session.spec, role, hosted.prev_bids[opp_role])
                before = session.period
                session.submit_bid(subject, bid)
                hosted.this_bids[role].append(bid)
                session.confirm(subject)
                changed = True
                if session.period != before or session.finished:
                    hosted.prev_bids = hosted.this_bids
                    hosted.this_bids = {HV: [], LV: []}

    def state_payload(self, hosted: Hosted, subject: int) -> dict:
        view = hosted.session.state_for(subject)
        payload = {"kind": "state", "session_id": hosted.session.config.session_id,
                   "subject": subject}
        payload.update(view)
        seat = hosted.seats.get(subject)
        if seat and seat.review and view.get("phase") == "reviewing":
            payload.update(seat.review)
        return payload


def _json_error(message: str, status: int = 400):
    return web.json_response({"kind": "error", "message": message}, status=status)


HOST_KEY = web.AppKey("host", ServiceHost)


def build_app(host: Optional[ServiceHost] = None, static_dir: Optional[str] = None) -> web.Application:
    host = host or ServiceHost()
    app = web.Application()
    app[HOST_KEY] = host
    if static_dir:
        import pathlib

        root = pathlib.Path(static_dir)

        async def index(_request):
            return web.FileResponse(root / "index.html")

        app.router.add_get("/", index)
        app.router.add_get("/app", index)
        app.router.add_static("/app/", root)

    async def admin_create(request: web.Request):
        body = await request.json()
        cfg = body.get("config", body)
        try:
            config = SessionConfig(
                auction=cfg["auction"],
                session_type=int(cfg["session_type"]),
                n_subjects=int(cfg["n_subjects"]),
                rng_seed=int(cfg["rng_seed"]),
                periods=int(cfg.get("periods", 40)),
                session_id=cfg.get("session_id"),
            )
            timeout_s = cfg.get("timeout_s", DEFAULT_TIMEOUT_S)
            hosted = host.create(config, timeout_s=timeout_s,
                                 human_seats=cfg.get("human_seats", ()))
        except (SessionError, KeyError, ValueError) as exc:
            return _json_error(str(exc))
        return web.json_response({
            "kind": "admin_status",
            "session_id": config.session_id,
            "seats": {str(s): seat.token for s, seat in hosted.seats.items()},
            "started": hosted.started,
        })

    async def admin_bots(request: web.Request):
        try:
            hosted = host.get(request.match_info["sid"])
            body = await request.json()
            async with hosted.lock:
                host.seat_bots(hosted, body.get("seats", {}))
        except SessionError as exc:
            return _json_error(str(exc))
        return web.json_response({"kind": "admin_status", "ok": True})

    async def admin_start(request: web.Request):
        try:
            hosted = host.get(request.match_info["sid"])
            async with hosted.lock:
                host.start(hosted)
            await _broadcast(hosted)
        except SessionError as exc:
            return _json_error(str(exc))
        return web.json_response(_status_payload(hosted))

    async def admin_status(request: web.Request):
        try:
            hosted = host.get(request.match_info["sid"])
        except SessionError as exc:
            return _json_error(str(exc), status=404)
        return web.json_response(_status_payload(hosted))

    def _status_payload(hosted: Hosted) -> dict:
        session = hosted.session
        return {
            "kind": "admin_status",
            "session_id": session.config.session_id,
            "started": hosted.started,
            "period": session.period,
            "periods": session.config.periods,
            "finished": session.finished,
            "paid_period": session.paid_period,
            "bots": sorted(s for s, seat in hosted.seats.items() if seat.bot is not None),
            "connected": sorted(s for s, seat in hosted.seats.items() if seat.socket is not None),
        }

    async def export_csv(request: web.Request):
        try:
            hosted = host.get(request.match_info["sid"])
        except SessionError as exc:
            return _json_error(str(exc), status=404)
        if not hosted.session.finished:
            return _json_error("session not finished", status=409)
        body = "\n".join(session_csv_lines(hosted.session)) + "\n"
        return web.Response(text=body, content_type="text/csv")

    async def export_events(request: web.Request):
        try:
            hosted = host.get(request.match_info["sid"])
        except SessionError as exc:
            return _json_error(str(exc), status=404)
        body = "\n".join(hosted.session.event_lines()) + "\n"
        return web.Response(text=body, content_type="application/x-ndjson")

    async def _send(socket, payload: dict):
        try:
            await socket.send_str(json.dumps(payload, separators=(",", ":")))
        except (ConnectionError, RuntimeError):
            pass

    async def _broadcast(hosted: Hosted):
        for subject, seat in hosted.seats.items():
            if seat.socket is not None:
                await _send(seat.socket, host.state_payload(hosted, subject))

    def _reset_timer(hosted: Hosted, subject: int):
        timer = hosted.timers.pop(subject, None)
        if timer:
            timer.cancel()
        if hosted.timeout_s is None or not hosted.started or hosted.session.finished:
            return

        async def fire():
            try:
                await asyncio.sleep(hosted.timeout_s)
                async with hosted.lock:
                    hosted.session.auto_confirm_last(subject)
                    host.pump_bots(hosted)
                await _broadcast(hosted)
            except asyncio.CancelledError:
                pass

        hosted.timers[subject] = asyncio.get_running_loop().create_task(fire())

    async def participant_ws(request: web.Request):
        session_id = request.query.get("session", "")
        token = request.query.get("token", "")
        try:
            hosted = host.get(session_id)
        except SessionError as exc:
            return _json_error(str(exc), status=404)
        subject = next((s for s, seat in hosted.seats.items() if seat.token == token), None)
        if subject is None:
            return _json_error("bad seat token", status=403)
        seat = hosted.seats[subject]
        if seat.bot is not None:
            return _json_error("seat is a bot", status=409)
        socket = web.WebSocketResponse()
        await socket.prepare(request)
        seat.socket = socket
        async with hosted.lock:
            await _send(socket, host.state_payload(hosted, subject))
        _reset_timer(hosted, subject)

        async for msg in socket:
            if msg.type != WSMsgType.TEXT:
                break
            try:
                data = json.loads(msg.data)
                kind = data.get("kind")
            except json.JSONDecodeError:
                await _send(socket, {"kind": "error", "message": "malformed message"})
                continue
            try:
                async with hosted.lock:
                    session = hosted.session
                    if kind == "join":
                        pass
                    elif kind == "submit_bid":
                        bid = data.get("bid")
                        guess = data.get("guess")
                        payload = session.submit_bid(subject, bid, guess=guess)
                        review = {"table": [_row_payload(r) for r in payload["table"]]}
                        if "hypothetical" in payload:
                            review["hypothetical"] = {
                                "guess": guess,
                                **{k: (frac_str(v) if isinstance(v, Fraction) else v)
                                   for k, v in payload["hypothetical"].items()},
                            }
                        seat.review = review
                        _, role, _ = session._pairs[subject]
                        hosted.this_bids[role].append(int(bid))
                    elif kind == "hypothesize":
                        guess = data.get("guess")
                        outcome = session.hypothesize(subject, guess)
                        seat.review = dict(seat.review or {})
                        seat.review["hypothetical"] = {
                            "guess": guess,
                            **{k: (frac_str(v) if isinstance(v, Fraction) else v)
                               for k, v in outcome.items()},
                        }
                    elif kind == "revise":
                        session.revise(subject)
                        seat.review = None
                    elif kind == "confirm":
                        before = session.period
                        session.confirm(subject)
                        seat.review = None
                        host.pump_bots(hosted)
                        if session.period != before or session.finished:
                            hosted.prev_bids = hosted.this_bids
                            hosted.this_bids = {HV: [], LV: []}
                    else:
                        await _send(socket, {"kind": "error", "message": f"unknown kind {kind!r}"})
                        continue
            except (DomainError, SessionError) as exc:
                await _send(socket, {"kind": "error", "message": str(exc)})
                continue
            _reset_timer(hosted, subject)
            async with hosted.lock:
                fb = session.feedback_for(subject)
                if fb is not None and kind == "confirm":
                    payload = {"kind": "feedback"}
                    payload.update({k: (frac_str(v) if isinstance(v, Fraction) else v)
                                    for k, v in fb.items()})
                    await _send(socket, payload)
            await _broadcast(hosted)

        seat.socket = None
        timer = hosted.timers.pop(subject, None)
        if timer:
            timer.cancel()
        return socket

    app.router.add_post("/admin/sessions", admin_create)
    app.router.add_post("/admin/sessions/{sid}/bots", admin_bots)
    app.router.add_post("/admin/sessions/{sid}/start", admin_start)
    app.router.add_get("/admin/sessions/{sid}", admin_status)
    app.router.add_get("/admin/sessions/{sid}/export.csv", export_csv)
    app.router.add_get("/admin/sessions/{sid}/events.jsonl", export_events)
    app.router.add_get("/ws", participant_ws)
    return app


def serve(host_addr: str = "127.0.0.1", port: int = 8080, static_dir: Optional[str] = None):
    """Run the service until interrupted."""
    web.run_app(build_app(static_dir=static_dir), host=host_addr, port=port)
