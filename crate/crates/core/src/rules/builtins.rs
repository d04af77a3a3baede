use std::cmp::Ordering;
use std::collections::HashMap;

use crate::geo::{self, Geometry};
use crate::term_graph::{Datatype, Term};

/// Guard predicates usable in rule bodies. None of them binds variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// `withinDistance(g1, g2, meters)`: minimum distance ≤ meters.
    WithinDistance,
    /// `distanceGreaterThan(g1, g2, meters)`: minimum distance > meters.
    DistanceGreaterThan,
    Intersects,
    /// `contains(container, contained)`.
    Contains,
    LessThan,
    GreaterThan,
    Equal,
    NotEqual,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::WithinDistance,
        Builtin::DistanceGreaterThan,
        Builtin::Intersects,
        Builtin::Contains,
        Builtin::LessThan,
        Builtin::GreaterThan,
        Builtin::Equal,
        Builtin::NotEqual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::WithinDistance => "withinDistance",
            Builtin::DistanceGreaterThan => "distanceGreaterThan",
            Builtin::Intersects => "intersects",
            Builtin::Contains => "contains",
            Builtin::LessThan => "lessThan",
            Builtin::GreaterThan => "greaterThan",
            Builtin::Equal => "equal",
            Builtin::NotEqual => "notEqual",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::WithinDistance | Builtin::DistanceGreaterThan => 3,
            _ => 2,
        }
    }
}

/// Parsed-geometry cache shared across one reasoning run.
#[derive(Default)]
pub(crate) struct GeomCache {
    map: HashMap<String, Geometry>,
}

impl GeomCache {
    fn geometry(&mut self, t: &Term) -> Result<&Geometry, String> {
        let lit = match t.as_literal() {
            Some(l) if l.datatype() == Datatype::WktLiteral => l,
            _ => return Err(format!("expected a wktLiteral, got {t}")),
        };
        if !self.map.contains_key(lit.lexical()) {
            let g = geo::parse_wkt(lit.lexical()).map_err(|e| e.to_string())?;
            self.map.insert(lit.lexical().to_string(), g);
        }
        Ok(&self.map[lit.lexical()])
    }
}

fn number(t: &Term) -> Option<f64> {
    t.as_literal().and_then(|l| l.as_f64())
}

fn require_number(t: &Term) -> Result<f64, String> {
    number(t).ok_or_else(|| format!("expected a number, got {t}"))
}

fn compare(a: &Term, b: &Term) -> Result<Ordering, String> {
    match (number(a), number(b)) {
        (Some(x), Some(y)) => x.partial_cmp(&y).ok_or_else(|| "incomparable numbers".to_string()),
        _ => Err(format!("cannot order {a} and {b}")),
    }
}

fn equal(a: &Term, b: &Term) -> Result<bool, String> {
    match (number(a), number(b)) {
        (Some(x), Some(y)) => Ok(x == y),
        (Some(_), None) | (None, Some(_)) if a.as_literal().is_some() && b.as_literal().is_some() => {
            Err(format!("cannot compare {a} with {b}"))
        }
        _ => Ok(a == b),
    }
}

pub(crate) fn evaluate(b: Builtin, args: &[Term], cache: &mut GeomCache) -> Result<bool, String> {
    match b {
        Builtin::WithinDistance | Builtin::DistanceGreaterThan => {
            let d = require_number(&args[2])?;
            let g1 = cache.geometry(&args[0])?.clone();
            let g2 = cache.geometry(&args[1])?;
            let dist = geo::min_distance_m(&g1, g2);
            Ok(if b == Builtin::WithinDistance { dist <= d } else { dist > d })
        }
        Builtin::Intersects | Builtin::Contains => {
            let g1 = cache.geometry(&args[0])?.clone();
            let g2 = cache.geometry(&args[1])?;
            Ok(if b == Builtin::Intersects { geo::intersects(&g1, g2) } else { geo::contains(&g1, g2) })
        }
        Builtin::LessThan => Ok(compare(&args[0], &args[1])? == Ordering::Less),
        Builtin::GreaterThan => Ok(compare(&args[0], &args[1])? == Ordering::Greater),
        Builtin::Equal => equal(&args[0], &args[1]),
        Builtin::NotEqual => equal(&args[0], &args[1]).map(|e| !e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term_graph::{Iri, Literal};

    fn eval(b: Builtin, args: &[Term]) -> Result<bool, String> {
        evaluate(b, args, &mut GeomCache::default())
    }

    #[test]
    fn numeric_coercion() {
        let i: Term = Literal::integer(3).into();
        let d: Term = Literal::double(3.0).into();
        assert_eq!(eval(Builtin::Equal, &[i.clone(), d.clone()]), Ok(true));
        assert_eq!(eval(Builtin::LessThan, &[i.clone(), Literal::double(3.5).into()]), Ok(true));
        assert!(eval(Builtin::GreaterThan, &[i.clone(), Literal::string("3").into()]).is_err());
        assert!(eval(Builtin::Equal, &[i, Literal::string("3").into()]).is_err());
        let a: Term = Iri::local("A").into();
        assert_eq!(eval(Builtin::NotEqual, &[a.clone(), Iri::local("B").into()]), Ok(true));
        assert_eq!(eval(Builtin::Equal, &[a.clone(), a]), Ok(true));
    }

    #[test]
    fn geometry_args_must_be_wkt() {
        let p: Term = Literal::new("POINT (0 0)", Datatype::WktLiteral).unwrap().into();
        let q: Term = Literal::new("POINT (0 0.001)", Datatype::WktLiteral).unwrap().into();
        let d: Term = Literal::integer(200).into();
        assert_eq!(eval(Builtin::WithinDistance, &[p.clone(), q.clone(), d.clone()]), Ok(true));
        assert_eq!(eval(Builtin::DistanceGreaterThan, &[p.clone(), q, d.clone()]), Ok(false));
        assert!(eval(Builtin::WithinDistance, &[p, Literal::string("x").into(), d]).is_err());
    }
}
