//! Values stored at namespace nodes.
//!
//! A value is a type tag (directory, file, or empty) plus an opaque token
//! distinguishing values of the same type. Snapshots never store the default
//! empty value explicitly; any node not mentioned by a snapshot holds it.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// The three value types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeTag {
    Dir,
    File,
    Empty,
}

impl TypeTag {
    pub const ALL: [TypeTag; 3] = [TypeTag::Dir, TypeTag::File, TypeTag::Empty];

    pub fn letter(self) -> char {
        match self {
            TypeTag::Dir => 'D',
            TypeTag::File => 'F',
            TypeTag::Empty => 'E',
        }
    }

    pub fn from_letter(c: char) -> Option<TypeTag> {
        match c {
            'D' => Some(TypeTag::Dir),
            'F' => Some(TypeTag::File),
            'E' => Some(TypeTag::Empty),
            _ => None,
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("value tokens must be non-empty")]
    EmptyToken,
    #[error("value token {0:?} contains a reserved character")]
    ReservedChar(String),
    #[error("a value universe needs at least one value of each type")]
    MissingType,
    #[error("the universe's empty values must start with the default empty value")]
    DefaultEmptyNotFirst,
    #[error("universe value {0} listed under the wrong type")]
    WrongTag(String),
}

/// A concrete value: type tag plus identifying token.
///
/// Equality is tag plus token. For real directory trees the token of a file
/// value is a content hash and all directories share one token; synthetic
/// universes use short tokens like `d0`, `f1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value {
    tag: TypeTag,
    token: String,
}

impl Value {
    pub fn new(tag: TypeTag, token: impl Into<String>) -> Result<Self, ValueError> {
        let token = token.into();
        if token.is_empty() {
            return Err(ValueError::EmptyToken);
        }
        if token.contains(['\t', '\n', '\r']) {
            return Err(ValueError::ReservedChar(token));
        }
        Ok(Value { tag, token })
    }

    pub fn dir(token: impl Into<String>) -> Result<Self, ValueError> {
        Value::new(TypeTag::Dir, token)
    }

    pub fn file(token: impl Into<String>) -> Result<Self, ValueError> {
        Value::new(TypeTag::File, token)
    }

    pub fn empty(token: impl Into<String>) -> Result<Self, ValueError> {
        Value::new(TypeTag::Empty, token)
    }

    /// The default empty value `E:e0`, held implicitly by every node a
    /// snapshot does not mention.
    pub fn default_empty() -> &'static Value {
        static DEFAULT: OnceLock<Value> = OnceLock::new();
        DEFAULT.get_or_init(|| Value {
            tag: TypeTag::Empty,
            token: "e0".to_string(),
        })
    }

    pub fn is_default_empty(&self) -> bool {
        self == Value::default_empty()
    }

    /// The canonical representative of a type: `d0`, `f0`, or the default
    /// empty value. Used when materializing witness filesystems, where only
    /// value types matter.
    pub fn canonical(tag: TypeTag) -> Value {
        match tag {
            TypeTag::Dir => Value {
                tag,
                token: "d0".to_string(),
            },
            TypeTag::File => Value {
                tag,
                token: "f0".to_string(),
            },
            TypeTag::Empty => Value::default_empty().clone(),
        }
    }

    pub fn tag(&self) -> TypeTag {
        self.tag
    }

    pub fn token(&self) -> &str {
        &self.token
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tag.letter(), self.token)
    }
}

/// A finite universe of available values, at least one per type.
///
/// The empty values start with the default empty value. Completeness of
/// set-comparison for simple sequences needs at least two values per type;
/// [`ValueUniverse::standard`] provides exactly that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueUniverse {
    dirs: Vec<Value>,
    files: Vec<Value>,
    empties: Vec<Value>,
}

impl ValueUniverse {
    pub fn new(
        dirs: Vec<Value>,
        files: Vec<Value>,
        empties: Vec<Value>,
    ) -> Result<Self, ValueError> {
        if dirs.is_empty() || files.is_empty() || empties.is_empty() {
            return Err(ValueError::MissingType);
        }
        if !empties[0].is_default_empty() {
            return Err(ValueError::DefaultEmptyNotFirst);
        }
        for (list, tag) in [
            (&dirs, TypeTag::Dir),
            (&files, TypeTag::File),
            (&empties, TypeTag::Empty),
        ] {
            if let Some(v) = list.iter().find(|v| v.tag() != tag) {
                return Err(ValueError::WrongTag(v.to_string()));
            }
        }
        Ok(ValueUniverse {
            dirs,
            files,
            empties,
        })
    }

    /// Two values per type: `d0 d1 / f0 f1 / e0 e1`.
    pub fn standard() -> Self {
        ValueUniverse {
            dirs: vec![Value::dir("d0").unwrap(), Value::dir("d1").unwrap()],
            files: vec![Value::file("f0").unwrap(), Value::file("f1").unwrap()],
            empties: vec![Value::default_empty().clone(), Value::empty("e1").unwrap()],
        }
    }

    pub fn values(&self, tag: TypeTag) -> &[Value] {
        match tag {
            TypeTag::Dir => &self.dirs,
            TypeTag::File => &self.files,
            TypeTag::Empty => &self.empties,
        }
    }

    /// All values in enumeration order: empties first, so that enumerating
    /// filesystems over a domain starts from the empty one.
    pub fn enumeration_values(&self) -> Vec<&Value> {
        self.empties
            .iter()
            .chain(&self.dirs)
            .chain(&self.files)
            .collect()
    }

    pub fn default_empty(&self) -> &Value {
        &self.empties[0]
    }

    pub fn is_singleton(&self, tag: TypeTag) -> bool {
        self.values(tag).len() == 1
    }

    pub fn has_two_per_type(&self) -> bool {
        TypeTag::ALL.iter().all(|&t| self.values(t).len() >= 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_by_construction() {
        assert_eq!(Value::dir("d0").unwrap().tag(), TypeTag::Dir);
        assert_eq!(Value::file("f1").unwrap().tag(), TypeTag::File);
        assert_eq!(Value::default_empty().tag(), TypeTag::Empty);
    }

    #[test]
    fn equality_needs_tag_and_token() {
        assert_ne!(Value::dir("x").unwrap(), Value::file("x").unwrap());
        assert_ne!(Value::file("f0").unwrap(), Value::file("f1").unwrap());
        assert_eq!(Value::file("f0").unwrap(), Value::file("f0").unwrap());
    }

    #[test]
    fn standard_universe_shape() {
        let u = ValueUniverse::standard();
        assert!(u.has_two_per_type());
        assert_eq!(u.default_empty(), Value::default_empty());
        assert_eq!(u.enumeration_values().len(), 6);
        assert!(u.enumeration_values()[0].is_default_empty());
    }

    #[test]
    fn universe_rejects_missing_or_misfiled_values() {
        assert!(ValueUniverse::new(vec![], vec![], vec![]).is_err());
        assert!(ValueUniverse::new(
            vec![Value::file("f0").unwrap()],
            vec![Value::file("f0").unwrap()],
            vec![Value::default_empty().clone()],
        )
        .is_err());
        assert!(ValueUniverse::new(
            vec![Value::dir("d0").unwrap()],
            vec![Value::file("f0").unwrap()],
            vec![Value::empty("e1").unwrap()],
        )
        .is_err());
    }

    #[test]
    fn renders_tag_colon_token() {
        assert_eq!(Value::empty("e0").unwrap().to_string(), "E:e0");
        assert_eq!(Value::canonical(TypeTag::File).to_string(), "F:f0");
    }
}
