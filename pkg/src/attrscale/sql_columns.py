"""Column-reference extraction for a small SELECT-only SQL subset.

Supported shape: a single SELECT statement with optional INNER/LEFT joins,
WHERE, GROUP BY, HAVING, ORDER BY and LIMIT/OFFSET tails. Subqueries, CTEs,
set operators and non-SELECT statements are rejected as unsupported.

The extractor does not build an AST. It tokenizes, splits the statement into
top-level clauses, resolves table aliases, then scans the column-bearing
clauses (select list, WHERE, GROUP BY, HAVING, ORDER BY, join ON conditions)
for identifiers. Matching against the attribute catalog happens after alias
resolution and case-folding; identifiers that match nothing are reported as
diagnostics, never as errors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import AttributeCatalog
from .errors import SqlSyntaxError, UnsupportedSqlError

# Words that can appear bare inside expressions but never name a column.
_EXPR_WORDS = frozenset("""
    and or not in is null like between exists case when then else end as
    distinct all any some asc desc nulls first last true false unknown
    cast interval escape collate using filter over partition rows range
    current_date current_timestamp current_time
    integer int bigint smallint tinyint text varchar char character numeric
    decimal real float double precision boolean date timestamp time
""".split())

_CLAUSE_STARTERS = frozenset(["from", "where", "group", "having", "order", "limit", "offset"])
_SET_OPS = frozenset(["union", "intersect", "except"])
_JOIN_WORDS = frozenset(["join", "inner", "left", "right", "full", "cross", "outer"])

_WORD_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_WORD_BODY = _WORD_START | frozenset("0123456789$")
_OP_CHARS = frozenset("=<>!+-/%^&|~")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT QIDENT NUMBER STRING OP LPAREN RPAREN COMMA DOT STAR SEMI
    text: str
    offset: int  # character offset into the statement

    def word(self) -> str | None:
        """Casefolded text when this token is a bare (unquoted) identifier."""
        return self.text.casefold() if self.kind == "IDENT" else None


def _byte_offset(sql: str, pos: int) -> int:
    return len(sql[:pos].encode("utf-8"))


def tokenize(sql: str) -> list[Token]:
    """Token stream for one statement; comments and whitespace are dropped."""
    tokens: list[Token] = []
    i, limit = 0, len(sql)
    while i < limit:
        ch = sql[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "-" and sql.startswith("--", i):
            nl = sql.find("\n", i)
            i = limit if nl < 0 else nl + 1
            continue
        if ch == "/" and sql.startswith("/*", i):
            end = sql.find("*/", i + 2)
            if end < 0:
                raise SqlSyntaxError("unterminated block comment", _byte_offset(sql, i))
            i = end + 2
            continue
        if ch == "'":
            j = i + 1
            while True:
                j = sql.find("'", j)
                if j < 0:
                    raise SqlSyntaxError("unterminated string literal", _byte_offset(sql, i))
                if sql.startswith("''", j):  # escaped quote
                    j += 2
                    continue
                break
            tokens.append(Token("STRING", sql[i : j + 1], i))
            i = j + 1
            continue
        if ch in ('"', "`"):
            j = sql.find(ch, i + 1)
            if j < 0:
                raise SqlSyntaxError("unterminated quoted identifier", _byte_offset(sql, i))
            tokens.append(Token("QIDENT", sql[i + 1 : j], i))
            i = j + 1
            continue
        if ch in _WORD_START:
            j = i + 1
            while j < limit and sql[j] in _WORD_BODY:
                j += 1
            tokens.append(Token("IDENT", sql[i:j], i))
            i = j
            continue
        if ch.isdigit():
            j = i + 1
            while j < limit and (sql[j].isdigit() or sql[j] in ".eE"):
                if sql[j] in "eE" and j + 1 < limit and sql[j + 1] in "+-":
                    j += 1
                j += 1
            tokens.append(Token("NUMBER", sql[i:j], i))
            i = j
            continue
        if ch == "(":
            tokens.append(Token("LPAREN", ch, i))
        elif ch == ")":
            tokens.append(Token("RPAREN", ch, i))
        elif ch == ",":
            tokens.append(Token("COMMA", ch, i))
        elif ch == ".":
            tokens.append(Token("DOT", ch, i))
        elif ch == "*":
            tokens.append(Token("STAR", ch, i))
        elif ch == ";":
            tokens.append(Token("SEMI", ch, i))
        elif ch in _OP_CHARS:
            j = i + 1
            while j < limit and sql[j] in _OP_CHARS:
                j += 1
            tokens.append(Token("OP", sql[i:j], i))
            i = j
            continue
        else:
            raise SqlSyntaxError(f"unexpected character {ch!r}", _byte_offset(sql, i))
        i += 1
    return tokens


@dataclass
class _Statement:
    select_list: list[Token]
    scan_segments: list[list[Token]]  # select list, ON conditions, WHERE, GROUP BY, HAVING, ORDER BY
    alias_map: dict[str, str]  # casefolded alias or table name -> casefolded table name
    select_aliases: frozenset[str]  # output names minted by AS in the select list


def _shape(sql: str) -> _Statement:
    tokens = tokenize(sql)
    if not tokens:
        raise SqlSyntaxError("empty statement", 0)
    head = tokens[0].word()
    if head == "with":
        raise UnsupportedSqlError("common table expressions are not supported", _byte_offset(sql, tokens[0].offset))
    if head != "select":
        raise UnsupportedSqlError("only SELECT statements are supported", _byte_offset(sql, tokens[0].offset))

    # One statement per string; a trailing semicolon is the only thing allowed after the tail.
    for pos, tok in enumerate(tokens):
        if tok.kind == "SEMI" and any(t.kind != "SEMI" for t in tokens[pos + 1 :]):
            raise UnsupportedSqlError("multiple statements are not supported", _byte_offset(sql, tokens[pos].offset))
    while tokens and tokens[-1].kind == "SEMI":
        tokens = tokens[:-1]

    depth = 0
    for pos, tok in enumerate(tokens):
        if tok.kind == "LPAREN":
            depth += 1
        elif tok.kind == "RPAREN":
            depth -= 1
            if depth < 0:
                raise SqlSyntaxError("unbalanced parenthesis", _byte_offset(sql, tok.offset))
        word = tok.word()
        if word == "select" and pos > 0:
            raise UnsupportedSqlError("subqueries are not supported", _byte_offset(sql, tok.offset))
        if word in _SET_OPS and depth == 0:
            raise UnsupportedSqlError(f"set operator {word.upper()} is not supported", _byte_offset(sql, tok.offset))
    if depth != 0:
        raise SqlSyntaxError("unbalanced parenthesis", _byte_offset(sql, tokens[-1].offset))

    # Clause boundaries exist only at paren depth zero.
    bounds: list[tuple[str, int]] = []
    depth = 0
    for pos, tok in enumerate(tokens):
        if tok.kind == "LPAREN":
            depth += 1
        elif tok.kind == "RPAREN":
            depth -= 1
        elif depth == 0:
            word = tok.word()
            if word in _CLAUSE_STARTERS:
                if word in ("group", "order"):
                    nxt = tokens[pos + 1].word() if pos + 1 < len(tokens) else None
                    if nxt != "by":
                        raise SqlSyntaxError(f"{word.upper()} must be followed by BY", _byte_offset(sql, tok.offset))
                bounds.append((word, pos))
    clauses: dict[str, list[Token]] = {}
    clause_rank = {"from": 0, "where": 1, "group": 2, "having": 3, "order": 4, "limit": 5, "offset": 6}
    last_rank = -1
    for name, pos in bounds:
        if clause_rank[name] <= last_rank:
            raise SqlSyntaxError(f"clause {name.upper()} misplaced", _byte_offset(sql, tokens[pos].offset))
        last_rank = clause_rank[name]
    cuts = bounds + [("end", len(tokens))]
    clauses["select"] = tokens[1 : cuts[0][1]]
    for idx in range(len(bounds)):
        name, start = bounds[idx]
        body_start = start + (2 if name in ("group", "order") else 1)
        clauses[name] = tokens[body_start : cuts[idx + 1][1]]

    alias_map, on_segments = _parse_from(sql, clauses.get("from", []))
    segments = [clauses["select"], *on_segments]
    for name in ("where", "group", "having", "order"):
        if name in clauses:
            segments.append(clauses[name])

    # Output names minted by AS may legally reappear in GROUP/ORDER BY.
    select_aliases = set()
    depth = 0
    sel = clauses["select"]
    for pos, tok in enumerate(sel):
        if tok.kind == "LPAREN":
            depth += 1
        elif tok.kind == "RPAREN":
            depth -= 1
        elif depth == 0 and tok.word() == "as" and pos + 1 < len(sel) and sel[pos + 1].kind in ("IDENT", "QIDENT"):
            select_aliases.add(sel[pos + 1].text.casefold())
    return _Statement(clauses["select"], segments, alias_map, frozenset(select_aliases))


def _parse_from(sql: str, tokens: list[Token]) -> tuple[dict[str, str], list[list[Token]]]:
    """Alias map and the ON condition token slices from a FROM clause."""
    alias_map: dict[str, str] = {}
    on_segments: list[list[Token]] = []
    i = 0

    def take_table_ref(i: int) -> int:
        if i >= len(tokens) or tokens[i].kind not in ("IDENT", "QIDENT"):
            off = tokens[i].offset if i < len(tokens) else (tokens[-1].offset if tokens else 0)
            raise SqlSyntaxError("expected table name", _byte_offset(sql, off))
        name = tokens[i].text.casefold()
        i += 1
        if i + 1 < len(tokens) and tokens[i].kind == "DOT" and tokens[i + 1].kind in ("IDENT", "QIDENT"):
            name = f"{name}.{tokens[i + 1].text.casefold()}"  # schema-qualified table
            i += 2
        alias = None
        if i < len(tokens) and tokens[i].word() == "as":
            i += 1
            if i >= len(tokens) or tokens[i].kind not in ("IDENT", "QIDENT"):
                raise SqlSyntaxError("expected alias after AS", _byte_offset(sql, tokens[i - 1].offset))
            alias = tokens[i].text.casefold()
            i += 1
        elif i < len(tokens) and tokens[i].kind in ("IDENT", "QIDENT") and tokens[i].word() not in _JOIN_WORDS and tokens[i].word() != "on":
            alias = tokens[i].text.casefold()
            i += 1
        alias_map[name] = name
        if alias:
            alias_map[alias] = name
        return i

    if tokens:
        i = take_table_ref(0)
    while i < len(tokens):
        tok = tokens[i]
        if tok.kind == "COMMA":
            i = take_table_ref(i + 1)
            continue
        word = tok.word()
        if word in ("right", "full", "cross"):
            raise UnsupportedSqlError(f"{word.upper()} JOIN is not supported", _byte_offset(sql, tok.offset))
        if word in ("inner", "left"):
            i += 1
            if i < len(tokens) and tokens[i].word() == "outer":
                i += 1
            if i >= len(tokens) or tokens[i].word() != "join":
                off = tokens[i].offset if i < len(tokens) else tok.offset
                raise SqlSyntaxError("expected JOIN", _byte_offset(sql, off))
            word = "join"
        if word == "join":
            i = take_table_ref(i + 1)
            if i < len(tokens) and tokens[i].word() == "on":
                i += 1
                start = i
                depth = 0
                while i < len(tokens):
                    t = tokens[i]
                    if t.kind == "LPAREN":
                        depth += 1
                    elif t.kind == "RPAREN":
                        depth -= 1
                    elif depth == 0 and (t.word() in _JOIN_WORDS or t.kind == "COMMA"):
                        break
                    i += 1
                on_segments.append(tokens[start:i])
            continue
        raise SqlSyntaxError(f"unexpected token {tok.text!r} in FROM clause", _byte_offset(sql, tok.offset))
    return alias_map, on_segments


def _scan_refs(tokens: list[Token]) -> list[tuple[str | None, str]]:
    """Candidate column references as (qualifier, name); name '*' marks a wildcard."""
    refs: list[tuple[str | None, str]] = []
    i = 0
    prev_kind: str | None = None
    while i < len(tokens):
        tok = tokens[i]
        if tok.kind in ("IDENT", "QIDENT"):
            word = tok.word()
            if word == "as":  # output alias or CAST target: skip the next bare word
                i += 2 if i + 1 < len(tokens) and tokens[i + 1].kind in ("IDENT", "QIDENT") else 1
                prev_kind = "IDENT"
                continue
            if word in _EXPR_WORDS:
                i += 1
                prev_kind = "IDENT"
                continue
            if i + 1 < len(tokens) and tokens[i + 1].kind == "DOT":
                if i + 2 < len(tokens) and tokens[i + 2].kind in ("IDENT", "QIDENT"):
                    refs.append((tok.text, tokens[i + 2].text))
                    i += 3
                elif i + 2 < len(tokens) and tokens[i + 2].kind == "STAR":
                    refs.append((tok.text, "*"))
                    i += 3
                else:
                    i += 2
                prev_kind = "IDENT"
                continue
            if i + 1 < len(tokens) and tokens[i + 1].kind == "LPAREN":
                i += 1  # function name, not a column
                prev_kind = "IDENT"
                continue
            refs.append((None, tok.text))
        elif tok.kind == "STAR" and prev_kind in (None, "COMMA"):
            refs.append((None, "*"))  # bare wildcard at the start of a select item
        prev_kind = tok.kind
        i += 1
    return refs


def extract_attributes(
    sql: str,
    catalog: AttributeCatalog,
    *,
    diagnostics: list[str] | None = None,
) -> set[int]:
    """Catalog indices of every attribute the statement references.

    Identifiers are matched after alias resolution and case-folding. A
    qualified reference t.c matches catalog entry "c" or "table.c" (with t
    resolved through the alias map); a bare reference matches "c" or, when
    exactly one dotted catalog entry ends in ".c", that entry. Unknown
    identifiers and wildcards are appended to `diagnostics` (when given) and
    otherwise ignored. Raises SqlSyntaxError / UnsupportedSqlError for
    statements outside the supported subset.
    """
    stmt = _shape(sql)
    found: set[int] = set()
    unknown: list[str] = []
    seen_unknown: set[str] = set()
    for segment in stmt.scan_segments:
        for qual, name in _scan_refs(segment):
            display = name if qual is None else f"{qual}.{name}"
            if name == "*":
                if display not in seen_unknown:
                    seen_unknown.add(display)
                    unknown.append(display)
                continue
            folded = name.casefold()
            idx = None
            if qual is not None:
                table = stmt.alias_map.get(qual.casefold(), qual.casefold())
                idx = catalog.lookup(folded)
                if idx is None:
                    idx = catalog.lookup(f"{table}.{folded}")
            else:
                idx = catalog.lookup(folded)
                if idx is None:
                    idx = catalog.lookup_suffix(folded)
                if idx is None and folded in stmt.select_aliases:
                    continue  # references an output column, not a base attribute
            if idx is None:
                if display not in seen_unknown:
                    seen_unknown.add(display)
                    unknown.append(display)
            else:
                found.add(idx)
    if diagnostics is not None:
        diagnostics.extend(unknown)
    return found
