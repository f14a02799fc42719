//! Property registry: index sets, coordinates, and properties attached
//! to object patterns.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, Index};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Free,
    Fixed,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Position::Free => "free",
            Position::Fixed => "fixed",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Property {
    Indices {
        position: Position,
        values: Option<Vec<String>>,
    },
    Coordinate,
    Derivative,
    PartialDerivative,
    AntiSymmetric,
    Symmetric,
    Depends(Vec<Expr>),
    Accent,
    Metric,
    InverseMetric,
}

/// One argument of a property declaration: `key=value` or positional.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyArg {
    pub key: Option<String>,
    pub value: Expr,
}

impl Property {
    pub fn name(&self) -> &'static str {
        match self {
            Property::Indices { .. } => "Indices",
            Property::Coordinate => "Coordinate",
            Property::Derivative => "Derivative",
            Property::PartialDerivative => "PartialDerivative",
            Property::AntiSymmetric => "AntiSymmetric",
            Property::Symmetric => "Symmetric",
            Property::Depends(_) => "Depends",
            Property::Accent => "Accent",
            Property::Metric => "Metric",
            Property::InverseMetric => "InverseMetric",
        }
    }

    /// Name as echoed in confirmations, e.g. `Indices(position=fixed)`.
    pub fn label(&self) -> String {
        match self {
            Property::Indices { position, .. } => format!("Indices(position={position})"),
            other => other.name().to_string(),
        }
    }

    /// Builds a property from its declared name and argument list.
    pub fn from_declaration(name: &str, args: &[PropertyArg]) -> Result<Property> {
        let no_options = |p: Property| -> Result<Property> {
            match args.first() {
                None => Ok(p),
                Some(a) => Err(Error::UnknownOption {
                    property: name.to_string(),
                    option: a.key.clone().unwrap_or_else(|| "<positional>".to_string()),
                }),
            }
        };
        match name {
            "Indices" => {
                let mut position = Position::Free;
                let mut values = None;
                for a in args {
                    match a.key.as_deref() {
                        Some("position") => {
                            position = match a.value.as_symbol() {
                                Some("free") => Position::Free,
                                Some("fixed") => Position::Fixed,
                                _ => {
                                    return Err(Error::InvalidProperty(
                                        "position must be free or fixed".to_string(),
                                    ))
                                }
                            }
                        }
                        Some("values") => values = Some(symbol_list(&a.value)?),
                        other => {
                            return Err(Error::UnknownOption {
                                property: name.to_string(),
                                option: other.unwrap_or("<positional>").to_string(),
                            })
                        }
                    }
                }
                Ok(Property::Indices { position, values })
            }
            "Depends" => {
                if let Some(a) = args.iter().find(|a| a.key.is_some()) {
                    return Err(Error::UnknownOption {
                        property: name.to_string(),
                        option: a.key.clone().unwrap_or_default(),
                    });
                }
                Ok(Property::Depends(
                    args.iter().map(|a| a.value.clone()).collect(),
                ))
            }
            "Coordinate" => no_options(Property::Coordinate),
            "Derivative" => no_options(Property::Derivative),
            "PartialDerivative" => no_options(Property::PartialDerivative),
            "AntiSymmetric" => no_options(Property::AntiSymmetric),
            "Symmetric" => no_options(Property::Symmetric),
            "Accent" => no_options(Property::Accent),
            "Metric" => no_options(Property::Metric),
            "InverseMetric" => no_options(Property::InverseMetric),
            other => Err(Error::UnknownProperty(other.to_string())),
        }
    }
}

fn symbol_list(e: &Expr) -> Result<Vec<String>> {
    let items: Vec<&Expr> = match e {
        Expr::List(xs) => xs.iter().collect(),
        other => vec![other],
    };
    items
        .into_iter()
        .map(|x| {
            x.as_symbol()
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidProperty("expected a list of symbols".to_string()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
struct IndexSet {
    names: Vec<String>,
    position: Position,
    values: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Registry {
    index_sets: Vec<IndexSet>,
    coordinates: Vec<String>,
    entries: Vec<(Expr, Property)>,
}

const LATIN: &str = "abcdefghijklmnopqrstuvwxyz";

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare_indices(
        &mut self,
        names: &[String],
        position: Position,
        values: Option<Vec<String>>,
    ) -> Result<()> {
        if names.is_empty() {
            return Err(Error::InvalidProperty("empty index list".to_string()));
        }
        self.index_sets.push(IndexSet {
            names: names.to_vec(),
            position,
            values,
        });
        Ok(())
    }

    pub fn declare_coordinate(&mut self, name: &str) {
        if !self.coordinates.iter().any(|c| c == name) {
            self.coordinates.push(name.to_string());
        }
    }

    /// Attaches `prop` to every object in `objects` (a single object or a
    /// `{a, b}` list).
    pub fn attach(&mut self, objects: &Expr, prop: Property) -> Result<()> {
        let items: Vec<Expr> = match objects {
            Expr::List(xs) => xs.clone(),
            other => vec![other.clone()],
        };
        match &prop {
            Property::Indices { position, values } => {
                let names = symbol_list(&Expr::List(items))?;
                return self.declare_indices(&names, *position, values.clone());
            }
            Property::Coordinate => {
                for n in symbol_list(&Expr::List(items))? {
                    self.declare_coordinate(&n);
                }
                return Ok(());
            }
            _ => {}
        }
        for obj in &items {
            if matches!(prop, Property::Metric | Property::InverseMetric)
                && !(matches!(obj, Expr::Atom { .. }) && obj.own_indices().len() == 2)
            {
                return Err(Error::InvalidProperty(format!(
                    "{} needs a tensor with two index slots",
                    prop.name()
                )));
            }
            let opposite = match prop {
                Property::Symmetric => Some("AntiSymmetric"),
                Property::AntiSymmetric => Some("Symmetric"),
                _ => None,
            };
            if let Some(op) = opposite {
                if self
                    .entries
                    .iter()
                    .any(|(p, q)| q.name() == op && same_pattern(p, obj))
                {
                    return Err(Error::ConflictingProperty(format!(
                        "{} already declared for this object",
                        op
                    )));
                }
            }
        }
        for obj in items {
            self.entries
                .retain(|(p, q)| !(q.name() == prop.name() && same_pattern(p, &obj)));
            self.entries.push((obj, prop.clone()));
        }
        Ok(())
    }

    fn index_set(&self, name: &str) -> Option<&IndexSet> {
        self.index_sets
            .iter()
            .rev()
            .find(|s| s.names.iter().any(|n| n == name))
    }

    pub fn is_coordinate(&self, name: &str) -> bool {
        self.coordinates.iter().any(|c| c == name)
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coordinates
    }

    /// True when indices with this name may be raised and lowered.
    pub fn position_free(&self, name: &str) -> bool {
        self.index_set(name)
            .map(|s| s.position == Position::Free)
            .unwrap_or(false)
    }

    pub fn is_declared_index(&self, name: &str) -> bool {
        self.index_set(name).is_some()
    }

    /// Names used for dummy renaming of an index called `name`: its own
    /// declared set, else the first declared set, else `a`..`z`.
    pub fn index_pool(&self, name: &str) -> Vec<String> {
        match self.index_set(name).or(self.index_sets.first()) {
            Some(s) => s.names.clone(),
            None => LATIN.chars().map(String::from).collect(),
        }
    }

    /// Coordinate values an index name ranges over, in declared order.
    pub fn index_values(&self, name: &str) -> Result<Vec<String>> {
        match self.index_set(name) {
            Some(IndexSet {
                position: Position::Fixed,
                values: Some(v),
                ..
            }) => Ok(v.clone()),
            _ => Err(Error::NoValues(name.to_string())),
        }
    }

    /// All properties whose pattern matches the head of `node`.
    pub fn lookup(&self, node: &Expr) -> Vec<&Property> {
        self.entries
            .iter()
            .filter(|(p, _)| self.head_matches(p, node))
            .map(|(_, q)| q)
            .collect()
    }

    pub fn has(&self, node: &Expr, name: &str) -> bool {
        self.lookup(node).iter().any(|p| p.name() == name)
    }

    /// +1 for symmetric (including metrics), -1 for antisymmetric slot
    /// lists.
    pub fn symmetry(&self, node: &Expr) -> Option<i8> {
        let props = self.lookup(node);
        props.iter().rev().find_map(|p| match p {
            Property::Symmetric | Property::Metric | Property::InverseMetric => Some(1),
            Property::AntiSymmetric => Some(-1),
            _ => None,
        })
    }

    /// Patterns carrying the property called `name`, in declaration order.
    pub fn patterns_with(&self, name: &str) -> Vec<&Expr> {
        self.entries
            .iter()
            .filter(|(_, q)| q.name() == name)
            .map(|(p, _)| p)
            .collect()
    }

    /// Objects the node is declared to depend on (empty when constant).
    pub fn dependencies(&self, node: &Expr) -> Vec<Expr> {
        self.lookup(node)
            .into_iter()
            .filter_map(|p| match p {
                Property::Depends(d) => Some(d.clone()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    fn head_matches(&self, pattern: &Expr, node: &Expr) -> bool {
        match (pattern, node) {
            (Expr::Wildcard, _) => true,
            (
                Expr::Atom {
                    name: pn,
                    indices: pi,
                },
                Expr::Atom {
                    name: tn,
                    indices: ti,
                },
            ) => pn == tn && self.slots_match(pi, ti),
            (
                Expr::Atom {
                    name: pn,
                    indices: pi,
                },
                Expr::Components(c),
            ) => *pn == c.head && self.slots_match(pi, &c.indices),
            (Expr::Deriv { indices: pi, arg }, Expr::Deriv { indices: ti, .. }) => {
                matches!(arg.as_ref(), Expr::Wildcard)
                    && (pi.is_empty() || self.slots_match(pi, ti))
            }
            (Expr::Accent { name: pn, .. }, Expr::Accent { name: tn, .. }) => pn == tn,
            _ => false,
        }
    }

    fn slots_match(&self, ps: &[Index], ts: &[Index]) -> bool {
        ps.len() == ts.len()
            && ps
                .iter()
                .zip(ts)
                .all(|(p, t)| p.variance == t.variance || self.position_free(&p.name))
    }
}

fn same_pattern(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (
            Expr::Atom {
                name: an,
                indices: ai,
            },
            Expr::Atom {
                name: bn,
                indices: bi,
            },
        ) => {
            an == bn
                && ai.len() == bi.len()
                && ai.iter().zip(bi).all(|(x, y)| x.variance == y.variance)
        }
        _ => a == b,
    }
}
