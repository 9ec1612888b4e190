"""Algorithmic type checking shared by both calculi.

Instead of guessing context splits, the checker threads one environment
through the term and computes the set of linear names each subterm
consumes.  A consumed name is marked so a second use is reported as a
linearity error; names introduced by a binder (or re-introduced by the
context update after a prefix) must be consumed before their scope ends.
The textbook context splits are reconstructed from the consumed sets and kept
in the derivation.
"""
from __future__ import annotations

from .context import (
    Context, Derivation, DualityFailure, LabelSetMismatch, LinearityError, LinearLeftover,
    LinearReintroduction, MissingAnnotation, MissingCaseArm, QualifierViolation,
    SubjectNotChoiceTyped, TypeMismatch, TypingError, UnboundName, UnknownSelectLabel,
)
from .sessiontypes import (
    AMP, BOOL_T, INT_T, PLUS, UNIT_T, CChoice, Comm, MChoice, Type, TypeFormError,
    components, dual_of, is_session, is_un, require_wellformed, subtype, type_equiv, unfold,
)
from .syntax import (
    IN, OUT, UN, BoolV, Branch, Case, Choice, If, Inact, IntV, New, Par, Receive, Select,
    Send, UnitV, Var, all_names, fresh_variant, rename,
)

_CONSUMED = object()


def _type_calculus(t: Type) -> str | None:
    if isinstance(t, MChoice):
        return "mixed"
    if isinstance(t, (Comm, CChoice)):
        return "classical"
    found = None
    for c in components(t):
        k = _type_calculus(c)
        if k:
            found = k
    return found


class Checker:
    def __init__(self, calculus: str, m0: bool = True):
        self.calculus = calculus
        self.m0 = m0

    # -- entry points -------------------------------------------------------

    def check(self, ctx: Context, p) -> Derivation:
        for name, t in ctx.items():
            self._wellformed(t, None, name)
        env = dict(ctx.items())
        d, used = self.proc(env, p)
        leftover = ctx.linear_names() - used
        if leftover:
            raise LinearLeftover(f"linear names never used: {', '.join(sorted(leftover))}")
        return d

    def check_value(self, ctx: Context, v) -> tuple[Type, Derivation]:
        env = dict(ctx.items())
        t, used, d = self.value(env, v)
        leftover = ctx.linear_names() - used
        if leftover:
            raise LinearLeftover(f"linear names never used: {', '.join(sorted(leftover))}")
        return t, d

    # -- helpers ------------------------------------------------------------

    def _wellformed(self, t, span, what):
        if t is None:
            raise MissingAnnotation(f"{what} has no type annotation", span)
        try:
            require_wellformed(t)
        except TypeFormError as e:
            raise TypeMismatch(f"{what}: {e}", span) from None
        kind = _type_calculus(t)
        if kind and kind != self.calculus:
            raise TypeMismatch(f"{what}: {kind} type used in a {self.calculus} program", span)

    @staticmethod
    def _ctx(env, used) -> Context:
        return Context((n, t) for n, t in env.items()
                       if t is not _CONSUMED and (is_un(t) or n in used))

    @staticmethod
    def _lookup(env, name, span) -> Type:
        if name not in env:
            raise UnboundName(f"unbound name {name}", span)
        t = env[name]
        if t is _CONSUMED:
            raise LinearityError(f"linear name {name} used more than once", span)
        return t

    @staticmethod
    def _consume(env, names):
        if not names:
            return env
        out = dict(env)
        for n in names:
            out[n] = _CONSUMED
        return out

    def value(self, env, v, span=None):
        match v:
            case Var(name):
                t = self._lookup(env, name, span)
                used = set() if is_un(t) else {name}
                return t, used, Derivation("Var", self._ctx(env, used), v, t)
            case BoolV():
                return BOOL_T, set(), Derivation("True" if v.value else "False", self._ctx(env, ()), v, BOOL_T)
            case UnitV():
                return UNIT_T, set(), Derivation("Unit", self._ctx(env, ()), v, UNIT_T)
            case IntV():
                return INT_T, set(), Derivation("Int", self._ctx(env, ()), v, INT_T)
        raise TypeError(f"not a value: {v!r}")

    def _typed_value(self, env, v, expected: Type, span):
        t, used, d = self.value(env, v, span)
        if not subtype(t, expected):
            from .printer import show_type

            raise TypeMismatch(f"value {v} has type {show_type(t)}, expected {show_type(expected)}", span)
        if t != expected:
            d = Derivation("Subt", d.context, v, expected, (d,))
        return used, d

    def _fresh_binder(self, env, name, body):
        """Rename ``name`` in ``body`` if it would shadow an entry of ``env``."""
        if name not in env:
            return name, body
        new = fresh_variant(name, set(env) | all_names(body))
        return new, rename(body, {name: new})

    def _cont(self, env, rebinds, p, span):
        """Check continuation ``p`` under ``env`` updated with ``rebinds``.

        Returns the derivation and the outer names the continuation consumes.
        """
        env2 = dict(env)
        introduced = []
        for name, t in rebinds:
            cur = env2.get(name)
            if cur is None or cur is _CONSUMED:
                env2[name] = t
                introduced.append(name)
            elif not (is_un(cur) and type_equiv(t, cur)):
                raise LinearReintroduction(
                    f"{name} re-enters the context at a type that does not match", span)
        d, used = self.proc(env2, p)
        left = [n for n in introduced if not is_un(env2[n]) and n not in used]
        if left:
            raise LinearLeftover(f"linear names never used: {', '.join(sorted(left))}", span)
        return d, used - set(introduced)

    @staticmethod
    def _same_usage(sets, what, span):
        first = sets[0]
        for s in sets[1:]:
            if s != first:
                diff = sorted(first ^ s)
                raise LinearLeftover(f"{what} use different linear names ({', '.join(diff)})", span)

    # -- processes --------------------------------------------------------------

    def proc(self, env, p) -> tuple[Derivation, set[str]]:
        span = getattr(p, "span", None)
        match p:
            case Inact():
                return Derivation("Inact", self._ctx(env, ()), p), set()
            case Par(left, right):
                d1, u1 = self.proc(env, left)
                d2, u2 = self.proc(env, right)
                both = u1 & u2
                if both:
                    raise LinearityError(
                        f"linear names used on both sides of |: {', '.join(sorted(both))}", span)
                used = u1 | u2
                return Derivation("Par", self._ctx(env, used), p, None, (d1, d2),
                                  (self._ctx(env, u1), self._ctx(env, u2))), used
            case New():
                return self._new(env, p, span)
            case If(cond, then, orelse):
                uc, dv = self._typed_value(env, cond, BOOL_T, span)
                env2 = self._consume(env, uc)
                d1, u1 = self.proc(env2, then)
                d2, u2 = self.proc(env2, orelse)
                self._same_usage([u1, u2], "the branches of if", span)
                used = uc | u1
                return Derivation("If", self._ctx(env, used), p, None, (dv, d1, d2),
                                  (self._ctx(env, uc), self._ctx(env2, u1))), used
            case Choice():
                if self.calculus != "mixed":
                    raise TypeMismatch("mixed choice in a classical program", span)
                return self._choice(env, p, span)
            case Send() | Receive() | Select() | Case():
                if self.calculus != "classical":
                    raise TypeMismatch("classical prefix in a mixed program", span)
                return self._classical(env, p, span)
        raise TypeError(f"not a process: {p!r}")

    def _new(self, env, p: New, span):
        x, y, t, body = p.x, p.y, p.type, p.body
        self._wellformed(t, span, f"channel {x}")
        if not is_session(t):
            raise DualityFailure(f"annotation of {x} is not a session type", span)
        try:
            s = dual_of(t)
        except TypeFormError as e:
            raise DualityFailure(str(e), span) from None
        renames = {}
        taken = set(env) | all_names(body)
        for n in (x, y):
            if n in env:
                new = fresh_variant(n, taken)
                taken.add(new)
                renames[n] = new
        if renames:
            body = rename(body, renames)
            x, y = renames.get(x, x), renames.get(y, y)
            p = New(x, y, t, body, p.span)
        env2 = {**env, x: t, y: s}
        d, used = self.proc(env2, body)
        left = [n for n in (x, y) if not is_un(env2[n]) and n not in used]
        if left:
            raise LinearLeftover(f"linear names never used: {', '.join(left)}", span)
        used = used - {x, y}
        return Derivation("Res", self._ctx(env, used), p, t, (d,), info={"dual": s}), used

    # -- mixed choice ---------------------------------------------------------------

    def _choice(self, env, p: Choice, span):
        x = p.subject
        raw = self._lookup(env, x, span)
        declared = unfold(raw)
        if not isinstance(declared, MChoice):
            raise SubjectNotChoiceTyped(f"{x} does not have a choice type", span)
        if p.q == UN and declared.q != UN:
            raise QualifierViolation(f"un choice on linear channel {x}", span)
        if self.m0 and p.q != declared.q:
            raise QualifierViolation(
                f"{p.q} choice on {x} whose type is {declared.q}", span)
        keys = {b.key for b in p.branches}
        if declared.view == PLUS:
            if not keys <= declared.keys:
                extra = sorted(f"{l}{pol}" for l, pol in keys - declared.keys)
                raise LabelSetMismatch(f"choice on {x} uses labels not in its type: {', '.join(extra)}", span)
            subsumed = MChoice(declared.q, declared.view,
                               tuple(b for b in declared.branches if b.key in keys))
        else:
            if keys != declared.keys:
                want = ", ".join(sorted(f"{l}{pol}" for l, pol in declared.keys))
                raise LabelSetMismatch(f"external choice on {x} must offer exactly {{{want}}}", span)
            subsumed = declared
        subj_used = set() if is_un(raw) else {x}
        subj_d = Derivation("Var", self._ctx(env, subj_used), Var(x), raw)
        if subsumed != raw:
            subj_d = Derivation("Subt", subj_d.context, Var(x), subsumed, (subj_d,))
        env1 = self._consume(env, subj_used)

        branch_ds, branch_used, new_branches = [], [], []
        for b in p.branches:
            tb = subsumed.branch(*b.key)
            bspan = b.span or span
            if b.polarity == OUT:
                uv, dv = self._typed_value(env1, b.payload, tb.payload, bspan)
                env2 = self._consume(env1, uv)
                dc, uc = self._cont(env2, [(x, tb.cont)], b.cont, bspan)
                nb = b
                prem = (dv, dc)
                splits = (subj_d.context, self._ctx(env, uv), self._ctx(env, uc))
                used_here = uv | uc
            else:
                z, cont = self._fresh_binder(env1, b.binder, b.cont)
                nb = Branch(b.label, IN, None, z, cont, b.span) if z != b.binder else b
                dc, uc = self._cont(env1, [(x, tb.cont), (z, tb.payload)], cont, bspan)
                prem = (dc,)
                splits = (subj_d.context, self._ctx(env, ()), self._ctx(env, uc))
                used_here = uc
            new_branches.append(nb)
            branch_used.append(used_here)
            branch_ds.append(Derivation("Out" if b.polarity == OUT else "In",
                                        self._ctx(env, subj_used | used_here), nb,
                                        None, prem, splits, info={"branch_type": tb}))
        self._same_usage(branch_used, f"the branches of the choice on {x}", span)
        used = subj_used | branch_used[0]
        if p.q == UN and used:
            raise QualifierViolation(
                f"un choice on {x} would capture linear names {', '.join(sorted(used))}", span)
        term = p if new_branches == list(p.branches) else Choice(p.q, x, tuple(new_branches), p.span)
        d = Derivation("Choice", self._ctx(env, used), term, subsumed, (subj_d, *branch_ds),
                       info={"declared": declared, "raw": raw, "qualifier": declared.q,
                             "view": declared.view})
        return d, used

    # -- classical prefixes -------------------------------------------------------------

    def _classical(self, env, p, span):
        from .printer import show_type

        x = p.subject
        raw = self._lookup(env, x, span)
        u = unfold(raw)
        subj_used = set() if is_un(raw) else {x}
        subj_d = Derivation("Var", self._ctx(env, subj_used), Var(x), raw)
        env1 = self._consume(env, subj_used)
        match p:
            case Send(_, payload, cont):
                if not (isinstance(u, Comm) and u.polarity == OUT):
                    raise TypeMismatch(f"{x} cannot send: it has type {show_type(raw)}", span)
                uv, dv = self._typed_value(env1, payload, u.payload, span)
                env2 = self._consume(env1, uv)
                dc, uc = self._cont(env2, [(x, u.cont)], cont, span)
                used = subj_used | uv | uc
                return Derivation("TOut", self._ctx(env, used), p, None, (subj_d, dv, dc),
                                  (subj_d.context, self._ctx(env, uv), self._ctx(env, uc))), used
            case Receive(q, _, binder, cont):
                if not (isinstance(u, Comm) and u.polarity == IN):
                    raise TypeMismatch(f"{x} cannot receive: it has type {show_type(raw)}", span)
                z, cont = self._fresh_binder(env1, binder, cont)
                term = p if z == binder else Receive(q, x, z, cont, p.span)
                dc, uc = self._cont(env1, [(x, u.cont), (z, u.payload)], cont, span)
                used = subj_used | uc
                if q == UN and used:
                    raise QualifierViolation(
                        f"un input on {x} would capture linear names {', '.join(sorted(used))}", span)
                return Derivation("TIn", self._ctx(env, used), term, None, (subj_d, dc),
                                  (subj_d.context, self._ctx(env, uc))), used
            case Select(_, label, cont):
                if not (isinstance(u, CChoice) and u.view == PLUS):
                    raise TypeMismatch(f"{x} cannot select: it has type {show_type(raw)}", span)
                arm = u.arm(label)
                if arm is None:
                    raise UnknownSelectLabel(f"label {label} is not offered by the type of {x}", span)
                dc, uc = self._cont(env1, [(x, arm)], cont, span)
                used = subj_used | uc
                return Derivation("Sel", self._ctx(env, used), p, None, (subj_d, dc),
                                  (subj_d.context, self._ctx(env, uc))), used
            case Case(_, arms):
                if not (isinstance(u, CChoice) and u.view == AMP):
                    raise TypeMismatch(f"{x} cannot branch: it has type {show_type(raw)}", span)
                have = {lab for lab, _ in arms}
                missing = u.labels - have
                if missing:
                    raise MissingCaseArm(
                        f"case on {x} lacks arms {', '.join(sorted(map(str, missing)))}", span)
                extra = have - u.labels
                if extra:
                    raise LabelSetMismatch(
                        f"case on {x} has arms not in its type: {', '.join(sorted(map(str, extra)))}", span)
                ds, us = [], []
                for lab, body in arms:
                    dc, uc = self._cont(env1, [(x, u.arm(lab))], body, span)
                    ds.append(dc)
                    us.append(uc)
                self._same_usage(us, f"the arms of the case on {x}", span)
                used = subj_used | (us[0] if us else set())
                return Derivation("Branch", self._ctx(env, used), p, None, (subj_d, *ds),
                                  (subj_d.context, self._ctx(env, used - subj_used))), used
        raise TypeError(f"not a classical prefix: {p!r}")


def well_typed(checker: Checker, ctx: Context, p) -> bool:
    try:
        checker.check(ctx, p)
        return True
    except TypingError:
        return False
