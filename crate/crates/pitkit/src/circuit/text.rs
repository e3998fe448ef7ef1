use super::*;
use crate::field::{parse_rational, Prime};
use crate::poly::{Monomial, MAX_VARS};
use std::fmt::Write;

#[derive(Debug)]
enum Node {
    Atom(String, usize, usize),
    List(Vec<Node>, usize, usize),
}

impl Node {
    fn pos(&self) -> (usize, usize) {
        match self {
            Node::Atom(_, l, c) | Node::List(_, l, c) => (*l, *c),
        }
    }
}

fn err<T>(at: (usize, usize), msg: impl Into<String>) -> Result<T> {
    Err(Error::Syntax { line: at.0, col: at.1, msg: msg.into() })
}

fn read_all(src: &str) -> Result<Vec<Node>> {
    let mut stack: Vec<(Vec<Node>, usize, usize)> = vec![(vec![], 0, 0)];
    let (mut line, mut col) = (1, 0);
    let mut atom: Option<(String, usize, usize)> = None;
    let flush = |atom: &mut Option<(String, usize, usize)>, stack: &mut Vec<(Vec<Node>, usize, usize)>| {
        if let Some((s, l, c)) = atom.take() {
            stack.last_mut().unwrap().0.push(Node::Atom(s, l, c));
        }
    };
    let mut in_comment = false;
    for ch in src.chars() {
        if ch == '\n' {
            line += 1;
            col = 0;
            in_comment = false;
            flush(&mut atom, &mut stack);
            continue;
        }
        col += 1;
        if in_comment {
            continue;
        }
        match ch {
            ';' => {
                flush(&mut atom, &mut stack);
                in_comment = true;
            }
            '(' => {
                flush(&mut atom, &mut stack);
                stack.push((vec![], line, col));
            }
            ')' => {
                flush(&mut atom, &mut stack);
                if stack.len() == 1 {
                    return err((line, col), "unbalanced `)`");
                }
                let (items, l, c) = stack.pop().unwrap();
                stack.last_mut().unwrap().0.push(Node::List(items, l, c));
            }
            c if c.is_whitespace() => flush(&mut atom, &mut stack),
            c => match &mut atom {
                Some((s, _, _)) => s.push(c),
                None => atom = Some((c.to_string(), line, col)),
            },
        }
    }
    flush(&mut atom, &mut stack);
    if stack.len() > 1 {
        let (_, l, c) = stack.last().unwrap();
        return err((line, col + 1), format!("unexpected end of input; `(` at {l}:{c} is never closed"));
    }
    Ok(stack.pop().unwrap().0)
}

fn head(n: &Node) -> Result<(&str, &[Node])> {
    match n {
        Node::List(items, ..) => match items.first() {
            Some(Node::Atom(h, ..)) => Ok((h.as_str(), &items[1..])),
            _ => err(n.pos(), "expected a keyword after `(`"),
        },
        Node::Atom(..) => err(n.pos(), "expected `(`"),
    }
}

fn int(n: &Node) -> Result<u64> {
    match n {
        Node::Atom(s, ..) => s.parse().or_else(|_| err(n.pos(), format!("expected a nonnegative integer, got `{s}`"))),
        _ => err(n.pos(), "expected an integer"),
    }
}

fn var(n: &Node) -> Result<u32> {
    let v = int(n)?;
    if v == 0 || v >= MAX_VARS as u64 {
        return err(n.pos(), format!("variable index must be in 1..{}", MAX_VARS - 1));
    }
    Ok(v as u32)
}

fn coeff(f: Fp, n: &Node) -> Result<u64> {
    match n {
        Node::Atom(s, ..) => {
            let r = parse_rational(s).ok_or(()).or_else(|_| err(n.pos(), format!("bad coefficient `{s}`")))?;
            f.from_rational(&r).ok_or(()).or_else(|_| err(n.pos(), "denominator vanishes in the field"))
        }
        _ => err(n.pos(), "expected a coefficient"),
    }
}

fn expect_len(n: &Node, args: &[Node], min: usize) -> Result<()> {
    if args.len() < min {
        return err(n.pos(), "too few arguments");
    }
    Ok(())
}

fn uni(f: Fp, n: &Node) -> Result<UniPoly> {
    let (h, args) = head(n)?;
    if h != "u" {
        return err(n.pos(), format!("expected `(u ...)`, got `{h}`"));
    }
    expect_len(n, args, 2)?;
    let v = var(&args[0])?;
    let cs = args[1..].iter().map(|a| coeff(f, a)).collect::<Result<Vec<_>>>()?;
    if cs.len() > crate::poly::MAX_EXP as usize + 1 {
        return err(n.pos(), "univariate degree too large");
    }
    Ok(UniPoly::new(f, v, cs))
}

fn factor(f: Fp, n: &Node) -> Result<Factor> {
    let (h, args) = head(n)?;
    match h {
        "sumuni" => Ok(Factor::Uni(SumUni::new(f, args.iter().map(|a| uni(f, a)).collect::<Result<_>>()?))),
        "sparse" => {
            expect_len(n, args, 1)?;
            let delta = int(&args[0])? as u32;
            let mut terms = vec![];
            for t in &args[1..] {
                let (th, targs) = head(t)?;
                if th != "t" {
                    return err(t.pos(), format!("expected `(t ...)`, got `{th}`"));
                }
                expect_len(t, targs, 1)?;
                let c = coeff(f, &targs[0])?;
                let mut exps = vec![];
                for v in &targs[1..] {
                    let (vh, vargs) = head(v)?;
                    if vh != "v" || vargs.len() != 2 {
                        return err(v.pos(), "expected `(v VAR EXP)`");
                    }
                    exps.push((var(&vargs[0])?, int(&vargs[1])? as u32));
                }
                let m = Monomial::from_exps(&exps).or_else(|e| err(t.pos(), e.to_string()))?;
                terms.push((m, c));
            }
            Ok(Factor::Sparse(SparseCircuit::new(SparsePoly::from_terms(f, terms), delta)?))
        }
        "topsum" | "product" | "powersum" | "roabp" => err(n.pos(), format!("`{h}` cannot appear as a factor")),
        other => Err(Error::UnknownClass(other.into())),
    }
}

fn product(f: Fp, n: &Node) -> Result<ProductCircuit> {
    let (h, args) = head(n)?;
    if h != "product" {
        return err(n.pos(), format!("expected `(product ...)`, got `{h}`"));
    }
    expect_len(n, args, 1)?;
    Ok(ProductCircuit::new(args.iter().map(|a| factor(f, a)).collect::<Result<_>>()?))
}

fn expr(f: Fp, n: &Node) -> Result<CircuitExpr> {
    let (h, args) = head(n)?;
    Ok(match h {
        "topsum" => {
            expect_len(n, args, 1)?;
            let terms = args.iter().map(|a| product(f, a)).collect::<Result<_>>()?;
            CircuitExpr::TopSum(TopSumCircuit::new(terms)?)
        }
        "product" => CircuitExpr::Product(product(f, n)?),
        "sumuni" | "sparse" => match factor(f, n)? {
            Factor::Uni(s) => CircuitExpr::SumUni(s),
            Factor::Sparse(s) => CircuitExpr::Sparse(s),
        },
        "powersum" => {
            let mut summands = vec![];
            for s in args {
                let (sh, sargs) = head(s)?;
                if sh != "s" || sargs.len() != 3 {
                    return err(s.pos(), "expected `(s COEFF factor EXP)`");
                }
                let exp = int(&sargs[2])? as u32;
                if exp == 0 {
                    return err(sargs[2].pos(), "exponent must be at least 1");
                }
                summands.push(Summand { coef: coeff(f, &sargs[0])?, base: factor(f, &sargs[1])?, exp });
            }
            CircuitExpr::PowerSum(PowerSumCircuit { summands })
        }
        "roabp" => {
            expect_len(n, args, 3)?;
            let w = int(&args[0])? as usize;
            let (oh, oargs) = head(&args[1])?;
            if oh != "order" || oargs.is_empty() {
                return err(args[1].pos(), "expected `(order VAR+)`");
            }
            let order = oargs.iter().map(var).collect::<Result<Vec<_>>>()?;
            let mut e1 = vec![0; w];
            if w > 0 {
                e1[0] = 1;
            }
            let (mut left, mut right) = (e1.clone(), e1);
            let mut layers = vec![];
            for a in &args[2..] {
                let (ah, aargs) = head(a)?;
                match ah {
                    "left" => left = aargs.iter().map(|c| coeff(f, c)).collect::<Result<_>>()?,
                    "right" => right = aargs.iter().map(|c| coeff(f, c)).collect::<Result<_>>()?,
                    "layer" => layers.push(aargs.iter().map(|u| uni(f, u)).collect::<Result<Vec<_>>>()?),
                    other => return err(a.pos(), format!("unexpected `{other}` in roabp")),
                }
            }
            let layers = layers
                .into_iter()
                .zip(&order)
                .map(|(l, &v)| l.into_iter().map(|u| if u.is_zero() { UniPoly::zero(v) } else { u }).collect())
                .collect();
            CircuitExpr::Roabp(Roabp::new(w, order, layers, left, right).or_else(|e| err(n.pos(), e.to_string()))?)
        }
        other => return Err(Error::UnknownClass(other.into())),
    })
}

pub fn parse_circuit(src: &str) -> Result<Circuit> {
    parse_circuit_in(src, None)
}

/// Like [`parse_circuit`], reading coefficients into `field` instead of the declared one.
pub fn parse_circuit_in(src: &str, field: Option<Fp>) -> Result<Circuit> {
    let nodes = read_all(src)?;
    let eof = {
        let lines: Vec<&str> = src.split('\n').collect();
        (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1)
    };
    let Some(first) = nodes.first() else {
        return err(eof, "empty input");
    };
    let (h, args) = head(first)?;
    if h != "field" || args.len() != 1 {
        return err(first.pos(), "expected `(field P)`");
    }
    let p = int(&args[0])?;
    let f = match field {
        Some(f) => f,
        None => Fp::new(Prime::new(p).or_else(|e| err(args[0].pos(), e.to_string()))?),
    };
    match nodes.len() {
        1 => err(eof, "missing circuit after field declaration"),
        2 => Ok(Circuit::new(f, expr(f, &nodes[1])?)),
        _ => err(nodes[2].pos(), "trailing input after circuit"),
    }
}

fn w_coeff(f: Fp, out: &mut String, c: u64) {
    write!(out, "{}", f.signed(c)).unwrap();
}

fn w_uni(f: Fp, out: &mut String, u: &UniPoly) {
    write!(out, "(u {}", u.var).unwrap();
    if u.is_zero() {
        out.push_str(" 0");
    }
    for &c in u.coeffs() {
        out.push(' ');
        w_coeff(f, out, c);
    }
    out.push(')');
}

fn w_factor(f: Fp, out: &mut String, g: &Factor) {
    match g {
        Factor::Uni(s) => {
            out.push_str("(sumuni");
            for u in s.unis() {
                out.push(' ');
                w_uni(f, out, u);
            }
            out.push(')');
        }
        Factor::Sparse(s) => {
            write!(out, "(sparse {}", s.delta()).unwrap();
            for &(m, c) in s.poly().terms().iter().rev() {
                out.push_str(" (t ");
                w_coeff(f, out, c);
                for (v, e) in m.vars() {
                    write!(out, " (v {v} {e})").unwrap();
                }
                out.push(')');
            }
            out.push(')');
        }
    }
}

fn w_product(f: Fp, out: &mut String, p: &ProductCircuit) {
    out.push_str("(product");
    for g in &p.factors {
        out.push_str("\n    ");
        w_factor(f, out, g);
    }
    out.push(')');
}

pub fn serialize_circuit(c: &Circuit) -> String {
    let f = c.field;
    let mut out = format!("(field {})\n", f.modulus());
    match &c.expr {
        CircuitExpr::TopSum(t) => {
            out.push_str("(topsum");
            for p in &t.terms {
                out.push_str("\n  ");
                w_product(f, &mut out, p);
            }
            out.push(')');
        }
        CircuitExpr::Product(p) => w_product(f, &mut out, p),
        CircuitExpr::PowerSum(p) => {
            out.push_str("(powersum");
            for s in &p.summands {
                out.push_str("\n  (s ");
                w_coeff(f, &mut out, s.coef);
                out.push(' ');
                w_factor(f, &mut out, &s.base);
                write!(out, " {})", s.exp).unwrap();
            }
            out.push(')');
        }
        CircuitExpr::SumUni(s) => w_factor(f, &mut out, &Factor::Uni(s.clone())),
        CircuitExpr::Sparse(s) => w_factor(f, &mut out, &Factor::Sparse(s.clone())),
        CircuitExpr::Roabp(r) => {
            write!(out, "(roabp {} (order", r.width).unwrap();
            for v in &r.order {
                write!(out, " {v}").unwrap();
            }
            out.push_str(")\n  (left");
            for &c in &r.left {
                out.push(' ');
                w_coeff(f, &mut out, c);
            }
            out.push_str(")\n  (right");
            for &c in &r.right {
                out.push(' ');
                w_coeff(f, &mut out, c);
            }
            out.push(')');
            for layer in &r.layers {
                out.push_str("\n  (layer");
                for u in layer {
                    out.push(' ');
                    w_uni(f, &mut out, u);
                }
                out.push(')');
            }
            out.push(')');
        }
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_variable_topsum() {
        let c = parse_circuit("(field 101) (topsum (product (sumuni (u 1 0 1))))").unwrap();
        assert_eq!(c.field.modulus(), 101);
        let CircuitExpr::TopSum(t) = &c.expr else { panic!() };
        assert_eq!(t.k(), 1);
        assert_eq!(expand_to_sparse(&c).unwrap(), SparsePoly::var(c.field, 1));
    }

    #[test]
    fn unclosed_list_reports_eof() {
        let e = parse_circuit("(field 101)\n(product").unwrap_err();
        assert_eq!(e, Error::Syntax { line: 2, col: 9, msg: "unexpected end of input; `(` at 2:1 is never closed".into() });
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse_circuit("(field 101)\n(topsum (product (sumuni (u 0 1))))"),
            Err(Error::Syntax { line: 2, col: 29, .. })
        ));
        assert_eq!(parse_circuit("(field 101) (blob 1)"), Err(Error::UnknownClass("blob".into())));
        assert_eq!(
            parse_circuit("(field 101) (sparse 1 (t 1 (v 1 2)))"),
            Err(Error::DegreeBound { got: 2, bound: 1 })
        );
        assert!(matches!(parse_circuit("(field 100) (sumuni)"), Err(Error::Syntax { line: 1, col: 8, .. })));
        assert!(matches!(
            parse_circuit("(field 101) (topsum (product (sumuni (u 1 1))) (product (sparse 1 (t 1 (v 1 1)))))"),
            Err(Error::ClassMismatch(_))
        ));
    }

    #[test]
    fn fractions_reduce_mod_p() {
        let c = parse_circuit("(field 7) (sumuni (u 1 1/2 -1))").unwrap();
        let CircuitExpr::SumUni(s) = &c.expr else { panic!() };
        assert_eq!(s.unis()[0].coeffs(), &[4, 6]);
    }

    #[test]
    fn roabp_round_trip_and_defaults() {
        let src = "(field 7) (roabp 1 (order 1 2) (layer (u 1 0 1)) (layer (u 2 0 1)))";
        let c = parse_circuit(src).unwrap();
        assert_eq!(c.eval(&[2, 3]).unwrap(), 6);
        assert_eq!(parse_circuit(&serialize_circuit(&c)).unwrap(), c);
    }
}
