"""Human-steered breadth-first curation of the category graph.

A session walks the category hierarchy from a start category. For each
visited category the user decides: keep the category and its articles
('y'), keep the category but not its articles ('s'), or skip it entirely.
Kept decisions enqueue the child categories; a visited-set guards against
the cycles that real category graphs contain.

Every decision is appended to a line-delimited log so a crashed or
interrupted session can be replayed deterministically.
"""

import json
from collections import deque
from dataclasses import dataclass

KEEP_ALL = "keep_all"
KEEP_CATEGORY_ONLY = "keep_category_only"
SKIP = "skip"
DECISIONS = (KEEP_ALL, KEEP_CATEGORY_ONLY, SKIP)

SAMPLE_SIZE = 10


class CurationError(ValueError):
    pass


@dataclass(frozen=True)
class CategoryPrompt:
    category: str
    sample_articles: tuple  # up to 10, first by canonical title order
    queue_length: int
    visited_count: int
    kept_count: int
    decision_count: int

    def to_jsonable(self):
        return {
            "category": self.category,
            "sample_articles": list(self.sample_articles),
            "queue_length": self.queue_length,
            "visited_count": self.visited_count,
            "kept_count": self.kept_count,
            "decision_count": self.decision_count,
        }


class CuratorSession:
    """Single-writer state machine for one curation run."""

    def __init__(self, graph, start_category, class_name):
        if start_category not in graph:
            raise CurationError(f"unknown start category {start_category!r}")
        self.graph = graph
        self.class_name = class_name
        self.start_category = start_category
        self.queue = deque([start_category])
        self.visited = set()
        self.decisions = []  # ordered (category, decision) log
        self.kept_articles = set()
        self.current = None

    @property
    def done(self):
        return self.current is None and not any(
            c not in self.visited for c in self.queue)

    def next_prompt(self):
        """The next category to decide on, or None when the queue is spent.

        Re-asking without an intervening decision returns the same prompt.
        """
        if self.current is None:
            while self.queue:
                cat = self.queue.popleft()
                if cat not in self.visited:
                    self.visited.add(cat)
                    self.current = cat
                    break
            else:
                return None
        return self._prompt_for(self.current)

    def _prompt_for(self, cat):
        sample = sorted(self.graph.members(cat))[:SAMPLE_SIZE]
        return CategoryPrompt(
            category=cat,
            sample_articles=tuple(sample),
            queue_length=len(self.queue),
            visited_count=len(self.visited),
            kept_count=len(self.kept_articles),
            decision_count=len(self.decisions),
        )

    def apply_decision(self, category, decision):
        if decision not in DECISIONS:
            raise CurationError(f"unknown decision {decision!r}")
        if category != self.current:
            raise CurationError(
                f"decision for {category!r} but current category is "
                f"{self.current!r}")
        if decision in (KEEP_ALL, KEEP_CATEGORY_ONLY):
            for child in sorted(self.graph.children(category)):
                if child not in self.visited:
                    self.queue.append(child)
        if decision == KEEP_ALL:
            self.kept_articles.update(self.graph.members(category))
        self.decisions.append((category, decision))
        self.current = None

    def export_article_set(self):
        return sorted(self.kept_articles)

    def state_summary(self):
        return {
            "class_name": self.class_name,
            "start_category": self.start_category,
            "queue_length": len(self.queue),
            "visited_count": len(self.visited),
            "kept_count": len(self.kept_articles),
            "decision_count": len(self.decisions),
            "decision_tail": [
                {"category": c, "decision": d} for c, d in self.decisions[-10:]
            ],
            "current": self.current,
            "done": self.done,
        }


def replay(graph, decision_log, class_name=None, start_category=None):
    """Rebuild a session by re-applying a decision log.

    The log records decisions in visit order, so replay walks the same BFS
    and must see the same categories; a mismatch means the log does not
    belong to this graph.
    """
    if start_category is None:
        if not decision_log:
            raise CurationError("empty decision log and no start category")
        start_category = decision_log[0][0]
    session = CuratorSession(graph, start_category, class_name or "")
    for idx, (category, decision) in enumerate(decision_log):
        prompt = session.next_prompt()
        if prompt is None:
            raise CurationError(
                f"decision #{idx} for {category!r} but the session is done")
        if prompt.category != category:
            raise CurationError(
                f"decision #{idx} references {category!r} but the session "
                f"visits {prompt.category!r}")
        session.apply_decision(category, decision)
    return session


# --- decision log file -------------------------------------------------------

def write_log_header(fh, session):
    fh.write(json.dumps({"class_name": session.class_name,
                         "start_category": session.start_category}) + "\n")
    fh.flush()


def append_log_decision(fh, category, decision):
    fh.write(json.dumps({"category": category, "decision": decision}) + "\n")
    fh.flush()


def read_log(path):
    """(class_name, start_category, [(category, decision), ...])"""
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise CurationError(f"empty decision log {path}")
    header = json.loads(lines[0])
    log = []
    for line in lines[1:]:
        rec = json.loads(line)
        log.append((rec["category"], rec["decision"]))
    return header.get("class_name", ""), header.get("start_category"), log


# --- terminal mode -----------------------------------------------------------

def run_tty_session(session, in_stream, out_stream, log_fh=None):
    """Drive a session through a terminal: 'y' keeps category and articles,
    's' keeps the category only, anything else skips. Stops at end of input
    or when the queue is exhausted."""
    if log_fh is not None:
        write_log_header(log_fh, session)
    while True:
        prompt = session.next_prompt()
        if prompt is None:
            out_stream.write("Queue empty, session done.\n")
            break
        out_stream.write(f"\nCategory: {prompt.category}\n")
        for title in prompt.sample_articles:
            out_stream.write(f"  - {title}\n")
        out_stream.write(
            f"[queue {prompt.queue_length}, kept {prompt.kept_count}] "
            "keep all (y) / category only (s) / skip (other)? ")
        out_stream.flush()
        answer = in_stream.readline()
        if not answer:
            out_stream.write("\nEnd of input, stopping session.\n")
            break
        answer = answer.strip()
        decision = {"y": KEEP_ALL, "s": KEEP_CATEGORY_ONLY}.get(answer, SKIP)
        session.apply_decision(prompt.category, decision)
        if log_fh is not None:
            append_log_decision(log_fh, prompt.category, decision)
    return session
