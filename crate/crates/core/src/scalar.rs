//! Exact scalar abstraction.
//!
//! Every comparison in this crate is an exact equality or ordering test, so the
//! scalar must be an ordered field with exact arithmetic. [`Scalar`] is
//! implemented for every `num_rational::Ratio<I>` over a signed integer type;
//! the crate-root alias [`crate::Rational`] picks the arbitrary-precision
//! `BigRational`. Fixed-width ratios such as `Ratio<i64>` also work but will
//! panic on overflow.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// An exact ordered field.
pub trait Scalar:
    Clone
    + Num
    + Signed
    + Ord
    + Hash
    + Debug
    + Display
    + FromStr
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits the scalar type")
    }

    fn from_frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_int(num) / Self::from_int(den)
    }

    fn is_integral(&self) -> bool;

    fn floor_value(&self) -> Self;

    /// Parses `p`, `-p` or `p/q`; the result is always in canonical form.
    fn parse(text: &str) -> Result<Self, ParseScalarError> {
        let trimmed = text.trim();
        let bad = || ParseScalarError(trimmed.to_string());
        let (num, den) = match trimmed.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (trimmed, "1"),
        };
        if num.is_empty() || den.is_empty() || den.starts_with('-') || den.starts_with('+') {
            return Err(bad());
        }
        let num = Self::from_str(num).map_err(|_| bad())?;
        let den = Self::from_str(den).map_err(|_| bad())?;
        if !num.is_integral() || !den.is_integral() || den.is_zero() {
            return Err(bad());
        }
        Ok(num / den)
    }
}

impl<I> Scalar for Ratio<I>
where
    I: Integer + Signed + Clone + Hash + Debug + Display + FromStr + Send + Sync + 'static,
    Ratio<I>: FromPrimitive + ToPrimitive + FromStr,
{
    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}` (expected an integer or `p/q`)")]
pub struct ParseScalarError(pub String);

/// Renders a vector as `(a, b, c)`.
pub fn render_tuple<T: Display>(values: &[T]) -> String {
    let parts: Vec<String> = values.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Parses a comma-separated list of rationals.
pub fn parse_list<T: Scalar>(text: &str) -> Result<Vec<T>, ParseScalarError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(T::parse).collect()
}

/// Serde adapters: rationals are written as strings (`"p/q"` or `"p"`) and
/// read from strings or JSON integers. Floats are rejected.
pub mod serde_q {
    use std::fmt;
    use std::marker::PhantomData;

    use serde::de::{self, SeqAccess, Visitor};
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    use super::Scalar;

    struct QVisitor<T>(PhantomData<T>);

    impl<'de, T: Scalar> Visitor<'de> for QVisitor<T> {
        type Value = T;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a rational as an integer or a \"p/q\" string")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<T, E> {
            T::parse(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<T, E> {
            Ok(T::from_int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<T, E> {
            let v = i64::try_from(v).map_err(E::custom)?;
            Ok(T::from_int(v))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<T, E> {
            Err(E::custom(format!(
                "floating-point literal {v} not allowed; write rationals as \"p/q\""
            )))
        }
    }

    pub fn serialize<T: Scalar, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        d.deserialize_any(QVisitor(PhantomData))
    }

    /// Newtype used to route nested containers through the adapter.
    pub(crate) struct Q<T>(pub T);

    impl<'de, T: Scalar> serde::Deserialize<'de> for Q<T> {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            deserialize(d).map(Q)
        }
    }

    impl<T: Scalar> serde::Serialize for Q<&T> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize(self.0, s)
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<T: Scalar, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&Q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(d: D) -> Result<Vec<T>, D::Error> {
            struct V<T>(PhantomData<T>);
            impl<'de, T: Scalar> Visitor<'de> for V<T> {
                type Value = Vec<T>;
                fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                    f.write_str("a list of rationals")
                }
                fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Vec<T>, A::Error> {
                    let mut out = Vec::new();
                    while let Some(Q(x)) = seq.next_element::<Q<T>>()? {
                        out.push(x);
                    }
                    Ok(out)
                }
            }
            d.deserialize_seq(V(PhantomData))
        }
    }

    pub mod vec2 {
        use super::*;

        struct Row<'a, T>(&'a [T]);

        impl<T: Scalar> serde::Serialize for Row<'_, T> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::vec::serialize(self.0, s)
            }
        }

        struct RowOwned<T>(Vec<T>);

        impl<'de, T: Scalar> serde::Deserialize<'de> for RowOwned<T> {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                super::vec::deserialize(d).map(RowOwned)
            }
        }

        pub fn serialize<T: Scalar, S: Serializer>(v: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for row in v {
                seq.serialize_element(&Row(row))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<T>>, D::Error> {
            let rows: Vec<RowOwned<T>> = serde::Deserialize::deserialize(d)?;
            Ok(rows.into_iter().map(|r| r.0).collect())
        }
    }

    pub mod opt_vec {
        use super::*;

        pub fn serialize<T: Scalar, S: Serializer>(
            v: &[Option<T>],
            s: S,
        ) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.as_ref().map(Q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T: Scalar, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Option<T>>, D::Error> {
            let raw: Vec<Option<Q<T>>> = serde::Deserialize::deserialize(d)?;
            Ok(raw.into_iter().map(|x| x.map(|q| q.0)).collect())
        }
    }
}
