"""Line-oriented text formats for complexes, dg-(co)algebras, contractions,
point clouds, filtered complexes, and persistence diagrams.

All formats are human writable: `#` starts a comment, blank lines are
ignored, coefficients are integers or fractions like `-2/3`.  Basis labels
must be globally unique so map lines can omit degrees.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .exactlin import QQ, Field, SparseMatrix
from .complexes import ChainComplex, ChainMap, Contraction, GradedBasis


class ParseError(ValueError):
    pass


def parse_field(s):
    s = s.strip().lower()
    if s in ("rational", "q", "qq", "0"):
        return QQ
    try:
        p = int(s)
    except ValueError:
        raise ParseError("unknown field %r" % s)
    return Field(p)


def _scalar(field, tok):
    tok = tok.strip()
    try:
        if "/" in tok:
            num, den = tok.split("/")
            if field.p is None:
                return field.of(Fraction(int(num), int(den)))
            return field.mul(field.of(int(num)), field.inv(field.of(int(den))))
        return field.of(int(tok))
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError("bad coefficient %r: %s" % (tok, e))


def fmt_scalar(field, v):
    if field.p is None and isinstance(v, Fraction) and v.denominator != 1:
        return "%d/%d" % (v.numerator, v.denominator)
    return "%d" % v


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _terms(rhs):
    """Split `c1*x + c2*y` into (coeff string, payload string) pairs."""
    out = []
    for term in rhs.split("+"):
        term = term.strip()
        if term in ("", "0"):
            continue
        if "*" not in term:
            raise ParseError("term %r lacks a coefficient (write c*label)" % term)
        c, payload = term.split("*", 1)
        out.append((c.strip(), payload.strip()))
    return out


class _ComplexParse:
    """Shared state for the complex-based formats."""

    def __init__(self, field):
        self.field = field
        self.labels = {}
        self.labmap = {}
        self.d_lines = []
        self.m_lines = []
        self.delta_lines = []

    def feed(self, lineno, line):
        if line.startswith("degree"):
            head, _, rest = line.partition(":")
            try:
                n = int(head.split()[1])
            except (IndexError, ValueError):
                raise ParseError("line %d: bad degree header" % lineno)
            for lab in rest.split():
                if lab in self.labmap:
                    raise ParseError("line %d: duplicate label %r" % (lineno, lab))
                self.labels.setdefault(n, []).append(lab)
                self.labmap[lab] = (n, len(self.labels[n]) - 1)
        elif line.startswith("d "):
            self.d_lines.append((lineno, line))
        elif line.startswith("m "):
            self.m_lines.append((lineno, line))
        elif line.startswith("delta "):
            self.delta_lines.append((lineno, line))
        else:
            raise ParseError("line %d: unrecognized line %r" % (lineno, line))

    def key(self, lineno, lab):
        if lab not in self.labmap:
            raise ParseError("line %d: unknown label %r" % (lineno, lab))
        return self.labmap[lab]

    def chain(self, lineno, rhs):
        out = {}
        f = self.field
        for c, lab in _terms(rhs):
            v = f.add(out.get(self.key(lineno, lab), f.zero), _scalar(f, c))
            key = self.key(lineno, lab)
            if v:
                out[key] = v
            elif key in out:
                del out[key]
        return out

    def complex(self):
        basis = GradedBasis(self.labels)
        cols = {n: [dict() for _ in range(basis.dim(n))] for n in basis.degrees()}
        for lineno, line in self.d_lines:
            parts = line.split("=", 1)
            if len(parts) != 2:
                raise ParseError("line %d: expected `d label = ...`" % lineno)
            lab = parts[0].split()[1]
            n, i = self.key(lineno, lab)
            for key, v in self.chain(lineno, parts[1]).items():
                if key[0] != n - 1:
                    raise ParseError("line %d: d is not of degree -1" % lineno)
                cols[n][i][key[1]] = v
        diffs = {n: SparseMatrix.from_columns(self.field, basis.dim(n - 1), cs)
                 for n, cs in cols.items()
                 if any(cs) and basis.dim(n - 1)}
        return ChainComplex(self.field, basis, diffs)


def parse_complex(text, field):
    st = _ComplexParse(field)
    for lineno, line in _lines(text):
        st.feed(lineno, line)
    if st.m_lines or st.delta_lines:
        raise ParseError("complex file contains algebra lines")
    return st.complex()


def parse_dga(text, field):
    from .dgalg import DGAlgebra
    st = _ComplexParse(field)
    for lineno, line in _lines(text):
        st.feed(lineno, line)
    C = st.complex()
    m2 = {}
    for lineno, line in st.m_lines:
        parts = line.split("=", 1)
        toks = parts[0].split()
        if len(parts) != 2 or len(toks) != 3:
            raise ParseError("line %d: expected `m a b = ...`" % lineno)
        ka, kb = st.key(lineno, toks[1]), st.key(lineno, toks[2])
        val = st.chain(lineno, parts[1])
        if val:
            m2[(ka, kb)] = val
    return DGAlgebra(C, m2)


def parse_dgc(text, field):
    from .dgalg import DGCoalgebra
    st = _ComplexParse(field)
    for lineno, line in _lines(text):
        st.feed(lineno, line)
    C = st.complex()
    delta = {}
    for lineno, line in st.delta_lines:
        parts = line.split("=", 1)
        if len(parts) != 2:
            raise ParseError("line %d: expected `delta label = ...`" % lineno)
        k = st.key(lineno, parts[0].split()[1])
        out = {}
        for c, payload in _terms(parts[1]):
            payload = payload.strip()
            if not (payload.startswith("(") and payload.endswith(")")):
                raise ParseError("line %d: coproduct term needs (l1,l2)" % lineno)
            labs = [x.strip() for x in payload[1:-1].split(",")]
            if len(labs) != 2:
                raise ParseError("line %d: coproduct term needs two labels" % lineno)
            pair = (st.key(lineno, labs[0]), st.key(lineno, labs[1]))
            v = field.add(out.get(pair, field.zero), _scalar(field, c))
            if v:
                out[pair] = v
            elif pair in out:
                del out[pair]
        if out:
            delta[k] = out
    return DGCoalgebra(C, delta)


def _emit_chain(field, basis, chain):
    if not chain:
        return "0"
    return " + ".join("%s*%s" % (fmt_scalar(field, v), basis.label(k))
                      for k, v in sorted(chain.items()))


def emit_complex(C):
    out = []
    for n in C.basis.degrees():
        out.append("degree %d: %s" % (n, " ".join(C.basis.labels[n])))
    for n in C.basis.degrees():
        for i in range(C.dim(n)):
            ch = C.apply_d({(n, i): C.field.one})
            if ch:
                out.append("d %s = %s" % (C.basis.label((n, i)),
                                          _emit_chain(C.field, C.basis, ch)))
    return "\n".join(out) + "\n"


def emit_dga(A):
    C = A.complex
    out = [emit_complex(C).rstrip("\n")]
    for (ka, kb), val in sorted(A.m2.items()):
        if val:
            out.append("m %s %s = %s" % (C.basis.label(ka), C.basis.label(kb),
                                         _emit_chain(C.field, C.basis, val)))
    return "\n".join(out) + "\n"


def emit_dgc(Cg):
    C = Cg.complex
    out = [emit_complex(C).rstrip("\n")]
    for k, val in sorted(Cg.delta.items()):
        terms = " + ".join("%s*(%s,%s)" % (fmt_scalar(C.field, v),
                                           C.basis.label(k1), C.basis.label(k2))
                           for (k1, k2), v in sorted(val.items()))
        out.append("delta %s = %s" % (C.basis.label(k), terms))
    return "\n".join(out) + "\n"


def _split_sections(text):
    sections = {}
    cur = None
    for lineno, line in _lines(text):
        if line.startswith("@"):
            cur = line[1:].strip()
            if cur in sections:
                raise ParseError("line %d: duplicate section @%s" % (lineno, cur))
            sections[cur] = []
        elif cur is None:
            raise ParseError("line %d: content before first @section" % lineno)
        else:
            sections[cur].append((lineno, line))
    return sections


def parse_contraction(text, field):
    """Sections @big and @small hold complexes; @f, @g, @phi hold one map
    line per basis element with nonzero image.  Labels in the two complexes
    must not collide."""
    sections = _split_sections(text)
    for name in ("big", "small", "f", "g", "phi"):
        if name not in sections:
            raise ParseError("missing section @%s" % name)
    st = _ComplexParse(field)
    for lineno, line in sections["big"]:
        st.feed(lineno, line)
    big_labels = set(st.labmap)
    for lineno, line in sections["small"]:
        st.feed(lineno, line)
    if st.m_lines or st.delta_lines:
        raise ParseError("contraction file contains algebra lines")
    labels_big = {n: [l for l in ls if l in big_labels]
                  for n, ls in st.labels.items()}
    labels_small = {n: [l for l in ls if l not in big_labels]
                    for n, ls in st.labels.items()}
    stb, sts = _ComplexParse(field), _ComplexParse(field)
    for sub, labs in ((stb, labels_big), (sts, labels_small)):
        for n, ls in labs.items():
            if ls:
                sub.feed(0, "degree %d: %s" % (n, " ".join(ls)))
    for lineno, line in st.d_lines:
        lab = line.split("=", 1)[0].split()[1]
        (stb if lab in big_labels else sts).feed(lineno, line)
    N, M = stb.complex(), sts.complex()
    f = ChainMap(N, M, 0, _remap_columns(stb, sts, sections["f"], "f", N, M, 0))
    g = ChainMap(M, N, 0, _remap_columns(sts, stb, sections["g"], "g", M, N, 0))
    phi = ChainMap(N, N, 1, _remap_columns(stb, stb, sections["phi"], "phi",
                                           N, N, 1))
    return Contraction(big=N, small=M, f=f, g=g, phi=phi)


def _remap_columns(src_st, dst_st, lines, word, src, dst, deg):
    cols = {n: [dict() for _ in range(src.dim(n))] for n in src.basis.degrees()}
    for lineno, line in lines:
        parts = line.split("=", 1)
        toks = parts[0].split()
        if len(parts) != 2 or len(toks) != 2 or toks[0] != word:
            raise ParseError("line %d: expected `%s label = ...`" % (lineno, word))
        n, i = src_st.key(lineno, toks[1])
        for c, lab in _terms(parts[1]):
            key = dst_st.key(lineno, lab)
            if key[0] != n + deg:
                raise ParseError("line %d: %s is not of degree %+d"
                                 % (lineno, word, deg))
            f = src.field
            col = cols[n][i]
            v = f.add(col.get(key[1], f.zero), _scalar(f, c))
            if v:
                col[key[1]] = v
            elif key[1] in col:
                del col[key[1]]
    return {n: SparseMatrix.from_columns(src.field, dst.dim(n + deg), cs)
            for n, cs in cols.items() if any(cs)}


def emit_contraction(con):
    def maplines(word, m, src, dst):
        out = []
        for n in src.basis.degrees():
            for i in range(src.dim(n)):
                ch = m.apply({(n, i): src.field.one})
                if ch:
                    out.append("%s %s = %s" % (word, src.basis.label((n, i)),
                                               _emit_chain(src.field, dst.basis, ch)))
        return out

    out = ["@big", emit_complex(con.big).rstrip("\n"),
           "@small", emit_complex(con.small).rstrip("\n")]
    out += ["@f"] + maplines("f", con.f, con.big, con.small)
    out += ["@g"] + maplines("g", con.g, con.small, con.big)
    out += ["@phi"] + maplines("phi", con.phi, con.big, con.big)
    return "\n".join(out) + "\n"


def parse_perturbation(text, field, big):
    """Degree -1 map on the labels of an existing complex, `d label = ...`
    lines only."""
    st = _ComplexParse(field)
    for n, ls in big.basis.labels.items():
        st.feed(0, "degree %d: %s" % (n, " ".join(ls)))
    lines = list(_lines(text))
    for lineno, line in lines:
        if not line.startswith("d "):
            raise ParseError("line %d: perturbation files hold `d` lines only"
                             % lineno)
    return ChainMap(big, big, -1,
                    _remap_columns(st, st, lines, "d", big, big, -1))


# --- numeric formats ----------------------------------------------------------

def _fmt_val(x):
    if math.isinf(x):
        return "inf"
    return "%.12g" % x


def parse_points(text):
    pts = []
    for lineno, line in _lines(text):
        try:
            pts.append(tuple(float(x) for x in line.split()))
        except ValueError:
            raise ParseError("line %d: bad coordinate" % lineno)
        if pts and len(pts[-1]) != len(pts[0]):
            raise ParseError("line %d: inconsistent dimension" % lineno)
    if not pts:
        raise ParseError("empty point cloud")
    return pts


def emit_points(pts):
    return "\n".join(" ".join(_fmt_val(x) for x in p) for p in pts) + "\n"


def parse_filtered(text):
    from .persistence import FilteredComplex
    simplices = []
    for lineno, line in _lines(text):
        toks = line.split()
        if len(toks) != 2:
            raise ParseError("line %d: expected `v0,v1,... value`" % lineno)
        try:
            verts = tuple(int(v) for v in toks[0].split(","))
            val = float(toks[1])
        except ValueError:
            raise ParseError("line %d: bad simplex line" % lineno)
        simplices.append((verts, val))
    try:
        return FilteredComplex(simplices)
    except ValueError as e:
        raise ParseError(str(e))


def emit_filtered(F):
    return "\n".join("%s %s" % (",".join(map(str, v)), _fmt_val(t))
                     for v, t in F.simplices) + "\n"


def parse_diagram(text):
    from .persistence import PersistenceDiagram
    intervals = []
    kind, arity, flicker, discarded = "classical", None, False, 0
    table = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("# delta"):
            kind, arity = "delta", int(line.split()[2])
            continue
        if line.startswith("# rank"):
            _, _, i, j, r = line.split()
            table[(float(i), float(j))] = int(r)
            continue
        if line.startswith("# flicker"):
            flicker = True
            continue
        if line.startswith("# discarded"):
            discarded = int(line.split()[2])
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 3:
            raise ParseError("bad interval line %r" % raw)
        try:
            k = int(toks[0])
            b = float(toks[1])
            d = math.inf if toks[2] == "inf" else float(toks[2])
        except ValueError:
            raise ParseError("bad interval line %r" % raw)
        intervals.append((b, d, k))
    return PersistenceDiagram(sorted(intervals, key=lambda iv: (iv[2], iv[0], iv[1])),
                              kind=kind, arity=arity, discarded=discarded,
                              rank_table=table or None, flicker=flicker)


def emit_diagram(D):
    out = []
    if D.kind == "delta":
        out.append("# delta %d" % D.arity)
    if D.discarded:
        out.append("# discarded %d" % D.discarded)
    if D.flicker:
        out.append("# flicker")
    for b, d, k in sorted(D.intervals, key=lambda iv: (iv[2], iv[0], iv[1])):
        out.append("%d %s %s" % (k, _fmt_val(b), _fmt_val(d)))
    for (i, j), r in sorted((D.rank_table or {}).items()):
        out.append("# rank %s %s %d" % (_fmt_val(i), _fmt_val(j), r))
    return "\n".join(out) + "\n"
