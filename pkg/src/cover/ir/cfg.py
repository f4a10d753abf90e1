from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import IRSyntaxError, MissingTerminator
from .nodes import Function, successors


@dataclass
class CFG:
    function: str
    entry: str
    succ: dict[str, tuple[str, ...]]
    pred: dict[str, list[str]]
    rpo: list[str]
    dead: set[str] = field(default_factory=set)

    @property
    def rpo_index(self) -> dict[str, int]:
        return {b: i for i, b in enumerate(self.rpo)}

    def edges(self) -> list[tuple[str, str]]:
        return [(a, b) for a, targets in self.succ.items() for b in targets]

    def back_edges(self) -> list[tuple[str, str]]:
        """Retreating edges w.r.t. the reverse-postorder numbering."""
        index = self.rpo_index
        return [(a, b) for a, b in self.edges() if a in index and b in index and index[b] <= index[a]]

    def dominators(self) -> dict[str, set[str]]:
        blocks = self.rpo
        dom = {b: set(blocks) for b in blocks}
        dom[self.entry] = {self.entry}
        changed = True
        while changed:
            changed = False
            for b in blocks[1:]:
                preds = [p for p in self.pred[b] if p in dom]
                new = set.intersection(*(dom[p] for p in preds)) if preds else set()
                new = new | {b}
                if new != dom[b]:
                    dom[b] = new
                    changed = True
        return dom


def build_cfg(fn: Function) -> CFG:
    if not fn.blocks:
        raise MissingTerminator(f"function {fn.name} has no blocks")
    labels = {b.label for b in fn.blocks}
    succ: dict[str, tuple[str, ...]] = {}
    pred: dict[str, list[str]] = {b.label: [] for b in fn.blocks}
    for b in fn.blocks:
        term = b.terminator
        if term is None:
            line = b.instrs[-1].line if b.instrs else 0
            raise MissingTerminator(f"block {b.label!r} in {fn.name} does not end in br/cbr/ret", line)
        targets = successors(term)
        for t in targets:
            if t not in labels:
                raise IRSyntaxError(f"branch to unknown label {t!r} in {fn.name}", term.line)
            pred[t].append(b.label)
        succ[b.label] = targets

    entry = fn.blocks[0].label
    # iterative DFS postorder
    seen = {entry}
    post: list[str] = []
    stack = [(entry, iter(succ[entry]))]
    while stack:
        node, it = stack[-1]
        for nxt in it:
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, iter(succ[nxt])))
                break
        else:
            stack.pop()
            post.append(node)
    rpo = post[::-1]
    dead = labels - seen
    return CFG(fn.name, entry, succ, pred, rpo, dead)
