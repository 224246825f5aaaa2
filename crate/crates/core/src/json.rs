//! Wire formats for objects, morphisms, groups, representations, diagrams,
//! families and chains. Matrices use the format of [`crate::linalg`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::completion::{Direction, MonotoneChain, OrthFamily};
use crate::error::{Error, Result};
use crate::linalg::{FieldTag, HermMat, Mat, Tolerance};
use crate::star::{Mor, Obj};
use crate::urep::{GroupTable, Rep};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl GroupJson {
    pub fn from_group(g: &GroupTable) -> Self {
        GroupJson {
            order: g.order(),
            table: g.table().to_vec(),
            identity: g.identity(),
        }
    }

    pub fn to_group(&self) -> Result<GroupTable> {
        if self.order != self.table.len() {
            return Err(Error::InvalidGroup(format!(
                "order {} with a table of {} rows",
                self.order,
                self.table.len()
            )));
        }
        GroupTable::new(self.table.clone(), self.identity)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepJson {
    pub group: GroupJson,
    pub dim: usize,
    pub field: FieldTag,
    pub images: Vec<Mat>,
}

impl RepJson {
    pub fn from_rep(r: &Rep) -> Self {
        RepJson {
            group: GroupJson::from_group(r.group()),
            dim: r.dim(),
            field: r.field(),
            images: r.images().to_vec(),
        }
    }

    /// Builds the representation without checking the representation laws.
    pub fn to_rep(&self) -> Result<Rep> {
        Rep::new(
            Arc::new(self.group.to_group()?),
            self.field,
            self.dim,
            self.images.clone(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdObjectJson {
    pub dim: usize,
}

/// `{"dim": n}` for finite-dimensional spaces, an inline representation otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectJson {
    Fd(FdObjectJson),
    Rep(RepJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub instance: String,
    pub dom: ObjectJson,
    pub cod: ObjectJson,
    pub payload: Mat,
}

fn object_json(o: &Obj) -> ObjectJson {
    match o {
        Obj::Fd(fd) => ObjectJson::Fd(FdObjectJson { dim: fd.dim }),
        Obj::Rep(r) => ObjectJson::Rep(RepJson::from_rep(r)),
    }
}

fn object_from_json(o: &ObjectJson, instance: &str, tol: &Tolerance) -> Result<Obj> {
    match (instance, o) {
        ("fdhilb-R", ObjectJson::Fd(d)) => Ok(Obj::fd(d.dim, FieldTag::Real)),
        ("fdhilb-C", ObjectJson::Fd(d)) => Ok(Obj::fd(d.dim, FieldTag::Complex)),
        ("urep", ObjectJson::Rep(r)) => Ok(Obj::Rep(Arc::new(r.to_rep()?.validated(tol)?))),
        (tag @ ("fdhilb-R" | "fdhilb-C" | "urep"), _) => {
            Err(Error::Json(format!("object descriptor does not match instance {tag}")))
        }
        (other, _) => Err(Error::Json(format!("unknown instance `{other}`"))),
    }
}

impl MorphismJson {
    pub fn from_mor(m: &Mor) -> Self {
        MorphismJson {
            instance: m.instance().tag().to_string(),
            dom: object_json(m.dom()),
            cod: object_json(m.cod()),
            payload: m.mat().clone(),
        }
    }

    /// Validates the objects, the shape and (for representations) the intertwining equation.
    pub fn to_mor(&self, tol: &Tolerance) -> Result<Mor> {
        let dom = object_from_json(&self.dom, &self.instance, tol)?;
        let cod = object_from_json(&self.cod, &self.instance, tol)?;
        Mor::new_with_tol(dom, cod, self.payload.clone(), tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagramKind {
    Chain,
    Cochain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    pub kind: DiagramKind,
    pub morphisms: Vec<MorphismJson>,
}

impl DiagramJson {
    pub fn to_mors(&self, tol: &Tolerance) -> Result<Vec<Mor>> {
        self.morphisms.iter().map(|m| m.to_mor(tol)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailJson {
    pub geometric: f64,
}

/// Terms `x_j : A → X` of an orthogonal family. With a geometric tail the
/// listed terms are the head of an infinite family whose Gram masses decay
/// by `ratio` after the last listed term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub terms: Vec<Mat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Mat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailJson>,
}

impl FamilyJson {
    /// The finite head as a family, and the mass allowance of the declared tail.
    pub fn to_family(&self, tol: &Tolerance) -> Result<(OrthFamily, f64)> {
        let first = self
            .terms
            .first()
            .ok_or_else(|| Error::InvalidInput("family without terms".into()))?;
        let mut fam = OrthFamily::finite(first.field(), first.cols(), self.terms.clone())?;
        if let Some(b) = &self.bound {
            fam = fam.with_bound(HermMat::new(b.clone(), tol)?);
        }
        let allowance = match self.tail {
            None => 0.0,
            Some(TailJson { geometric: ratio }) => {
                if !(0.0..1.0).contains(&ratio) {
                    return Err(Error::InvalidInput(format!(
                        "geometric tail ratio {ratio} outside [0, 1)"
                    )));
                }
                let last = self.terms.last().expect("nonempty");
                (&last.adjoint() * last).norm() * ratio / (1.0 - ratio)
            }
        };
        Ok((fam, allowance))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionJson {
    Increasing,
    Decreasing,
}

/// A finite monotone chain of Hermitian matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainJson {
    pub terms: Vec<Mat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Mat>,
}

impl ChainJson {
    pub fn to_chain(&self, tol: &Tolerance) -> Result<MonotoneChain> {
        let terms = self
            .terms
            .iter()
            .map(|t| HermMat::new(t.clone(), tol))
            .collect::<Result<Vec<_>>>()?;
        let direction = match self.direction.unwrap_or(DirectionJson::Increasing) {
            DirectionJson::Increasing => Direction::Increasing,
            DirectionJson::Decreasing => Direction::Decreasing,
        };
        let chain = MonotoneChain::finite(terms, direction)?;
        match &self.bound {
            Some(b) => chain.with_bound(HermMat::new(b.clone(), tol)?),
            None => Ok(chain),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::urep::{rep_object, Rep};

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn fd_morphism_layout() {
        let m = Mor::new(
            Obj::fd(1, FieldTag::Real),
            Obj::fd(2, FieldTag::Real),
            Mat::from_real(2, 1, &[0.1, -3.5]).unwrap(),
        )
        .unwrap();
        let s = serde_json::to_string(&MorphismJson::from_mor(&m)).unwrap();
        assert_eq!(
            s,
            r#"{"instance":"fdhilb-R","dom":{"dim":1},"cod":{"dim":2},"payload":{"rows":2,"cols":1,"field":"R","data":[0.1,-3.5]}}"#
        );
        let back: MorphismJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_mor(&t()).unwrap(), m);
    }

    #[test]
    fn instance_mismatch_rejected() {
        let s = r#"{"instance":"fdhilb-C","dom":{"dim":1},"cod":{"dim":1},"payload":{"rows":1,"cols":1,"field":"R","data":[1.0]}}"#;
        let j: MorphismJson = serde_json::from_str(s).unwrap();
        assert!(matches!(j.to_mor(&t()), Err(Error::FieldMismatch(_))));
        let s = r#"{"instance":"hilb","dom":{"dim":1},"cod":{"dim":1},"payload":{"rows":1,"cols":1,"field":"R","data":[1.0]}}"#;
        let j: MorphismJson = serde_json::from_str(s).unwrap();
        assert!(matches!(j.to_mor(&t()), Err(Error::Json(_))));
    }

    #[test]
    fn rep_morphism_round_trip() {
        let c3 = Arc::new(GroupTable::cyclic(3));
        let reg = rep_object(Rep::regular(c3, FieldTag::Complex));
        let id = reg.identity();
        let s = serde_json::to_string(&MorphismJson::from_mor(&id)).unwrap();
        let back: MorphismJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_mor(&t()).unwrap(), id);
    }

    #[test]
    fn geometric_tail_allowance() {
        let s = r#"{"terms":[{"rows":2,"cols":1,"field":"R","data":[0.5,0.0]},{"rows":2,"cols":1,"field":"R","data":[0.0,0.25]}],"tail":{"geometric":0.25}}"#;
        let fam: FamilyJson = serde_json::from_str(s).unwrap();
        let (_, eps) = fam.to_family(&t()).unwrap();
        assert_eq!(eps, 0.0625 * 0.25 / 0.75);
    }

    #[test]
    fn chain_defaults_to_increasing() {
        let s =
            r#"{"terms":[{"rows":1,"cols":1,"field":"R","data":[0.0]},{"rows":1,"cols":1,"field":"R","data":[1.0]}]}"#;
        let c: ChainJson = serde_json::from_str(s).unwrap();
        assert_eq!(c.to_chain(&t()).unwrap().direction(), Direction::Increasing);
    }
}
