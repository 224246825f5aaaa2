//! Matrix wire format: `{"rows": m, "cols": n, "field": "R"|"C", "data": [...]}`,
//! row-major, complex entries as `[re, im]` pairs.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::mat::{FieldTag, Mat, C64};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    field: FieldTag,
    data: Vec<Entry>,
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let data = self
            .data()
            .iter()
            .map(|z| match self.field() {
                FieldTag::Real => Entry::Real(z.re),
                FieldTag::Complex => Entry::Complex([z.re, z.im]),
            })
            .collect();
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            field: self.field(),
            data,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let data = raw
            .data
            .into_iter()
            .map(|e| match (raw.field, e) {
                (FieldTag::Real, Entry::Real(x)) => Ok(C64::new(x, 0.0)),
                (FieldTag::Complex, Entry::Complex([re, im])) => Ok(C64::new(re, im)),
                (FieldTag::Real, Entry::Complex(_)) => {
                    Err(D::Error::custom("real matrix entry given as [re, im] pair"))
                }
                (FieldTag::Complex, Entry::Real(_)) => {
                    Err(D::Error::custom("complex matrix entry must be a [re, im] pair"))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Mat::new(raw.rows, raw.cols, raw.field, data).map_err(D::Error::custom)
    }
}
