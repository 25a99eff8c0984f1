"""Text grammar for expressions: parser and printer"""
from typing import List, Tuple

import pyparsing as pp
import sympy

from symbolic.atoms import FIELDS, FieldAtom, is_atom_name, make_atom
from symbolic.canonical import canonicalize
from symbolic.errors import IndexArityError, ParseError
from symbolic.expression import Expression
from symbolic.indices import Index

pp.ParserElement.enable_packrat()


def _number(tokens):
    return Expression.scalar(sympy.Rational(tokens[0]))


def _atom_or_scalar(tokens):
    name = tokens[0]
    indices = tokens[1] if len(tokens) > 1 and isinstance(tokens[1], pp.ParseResults) else None
    exponent = tokens[-1] if isinstance(tokens[-1], str) and tokens[-1] != name else None
    if indices is not None:
        if exponent is not None:
            raise IndexArityError(f"power applied to indexed atom '{name}'")
        atom = make_atom(name, [Index.parse(t) for t in indices])
        return Expression.of(atom)
    if is_atom_name(name):
        if exponent is not None:
            raise IndexArityError(f"power applied to atom '{name}'")
        return Expression.of(make_atom(name))
    if name in FIELDS:
        raise IndexArityError(f"{name} requires an index list")
    symbol = sympy.Symbol(name)
    if exponent is not None:
        return Expression.scalar(symbol ** int(exponent))
    return Expression.scalar(symbol)


def _derivative(tokens):
    from symbolic.calculus import derive
    op, token, body = tokens[0]
    return derive(body, Index.parse(token))


def _group(tokens):
    body = tokens[0]
    if len(tokens) == 1:
        return body
    if any(t.factors for t in body.terms):
        raise IndexArityError("power applied to a field expression")
    return Expression.scalar(sum(t.coeff for t in body.terms) ** int(tokens[1]))


def _product(tokens):
    result = tokens[0]
    for factor in tokens[1:]:
        result = result * factor
    return result


def _sum(tokens):
    tokens = list(tokens)
    sign = 1
    if isinstance(tokens[0], str):
        sign = -1 if tokens.pop(0) == "-" else 1
    result = tokens.pop(0).scaled(sign)
    while tokens:
        op, term = tokens.pop(0), tokens.pop(0)
        result = result + (term if op == "+" else -term)
    return result


def _build_grammar():
    lbr, rbr, lpar, rpar = map(pp.Suppress, "[]()")
    ident = pp.Word(pp.alphas, pp.alphanums + "_")
    index_token = pp.Combine(pp.Optional(".") + pp.Word(pp.alphas, pp.alphanums))
    index_list = pp.Group(index_token + pp.ZeroOrMore(pp.Suppress(",") + index_token))
    number = pp.Regex(r"\d+(/\d+)?").set_parse_action(_number)
    power = pp.Suppress("^") + pp.Regex(r"-?\d+")

    expr = pp.Forward()
    operator = pp.Regex(r"(nab|d)(?=\[)")
    derivative = pp.Group(operator + lbr + index_token + rbr + lpar + expr + rpar)
    derivative.set_parse_action(_derivative)
    atom = (ident + pp.Optional(lbr + index_list + rbr) + pp.Optional(power))
    atom.set_parse_action(_atom_or_scalar)
    group = (lpar + expr + rpar + pp.Optional(power)).set_parse_action(_group)
    factor = derivative | number | atom | group
    term = (factor + pp.ZeroOrMore(pp.Suppress("*") + factor)).set_parse_action(_product)
    sign = pp.one_of("+ -")
    expr <<= (pp.Optional(sign) + term + pp.ZeroOrMore(sign + term)).set_parse_action(_sum)
    return expr


_GRAMMAR = _build_grammar()


def parse(text: str) -> Expression:
    """Parse grammar text into a canonical Expression"""
    try:
        result = _GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseException as e:
        raise ParseError(f"syntax error: {e.msg}", text, e.col) from e
    return canonicalize(result)


def atom_text(atom: FieldAtom) -> str:
    text = atom.name
    if atom.indices:
        text += "[" + ",".join(str(i) for i in atom.indices) + "]"
    for d in atom.iderivs:
        text = f"nab[{d}]({text})"
    for d in atom.sderivs:
        text = f"d[{d}]({text})"
    return text


def _coefficient_terms(coeff) -> List[sympy.Expr]:
    if coeff.is_Rational:
        return [coeff]
    numerator, denominator = sympy.fraction(sympy.cancel(coeff))
    return [part / denominator for part in sympy.Add.make_args(sympy.expand(numerator))]


def _coefficient_text(coeff) -> Tuple[List[str], bool]:
    """Grammar factors for a single positive coefficient term"""
    rational, rest = coeff.as_coeff_Mul()
    parts = []
    if rest != 1:
        powers = rest.as_powers_dict()
        symbols = sorted((b for b in powers if b.is_Symbol), key=lambda s: s.name)
        groups = sorted((b for b in powers if not b.is_Symbol), key=str)
        for base in symbols + groups:
            exp = powers[base]
            if not exp.is_Integer:
                raise ValueError(f"no grammar text for the power {base}**{exp}")
            text = base.name if base.is_Symbol else f"({to_text(Expression.scalar(base))})"
            parts.append(text if exp == 1 else f"{text}^{exp}")
    return parts, rational


def monomial_text(coeff, factors) -> str:
    parts, rational = _coefficient_text(coeff)
    atoms = [atom_text(a) for a in factors]
    if rational != 1 or not (parts or atoms):
        parts.insert(0, str(rational))
    return "*".join(parts + atoms)


def to_text(expr: Expression) -> str:
    """Render an Expression in the grammar accepted by parse"""
    pieces = []
    for term in expr.terms:
        for part in _coefficient_terms(term.coeff):
            pieces.append((part, term.factors))
    if not pieces:
        return "0"
    out = []
    for n, (coeff, factors) in enumerate(pieces):
        negative = coeff.could_extract_minus_sign()
        body = monomial_text(-coeff if negative else coeff, factors)
        if n == 0:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)
