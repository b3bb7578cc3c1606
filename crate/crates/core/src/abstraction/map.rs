use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AbstractionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Var,
    Method,
    Type,
    String,
    Char,
    Int,
    Float,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Var,
        Category::Method,
        Category::Type,
        Category::String,
        Category::Char,
        Category::Int,
        Category::Float,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Category::Var => "VAR",
            Category::Method => "METHOD",
            Category::Type => "TYPE",
            Category::String => "STRING",
            Category::Char => "CHAR",
            Category::Int => "INT",
            Category::Float => "FLOAT",
        }
    }

    pub fn is_identifier(self) -> bool {
        matches!(self, Category::Var | Category::Method | Category::Type)
    }
}

/// An abstract token such as `VAR_1` or `STRING_3`. Indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbstractId {
    pub category: Category,
    pub index: u32,
}

impl fmt::Display for AbstractId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.category.prefix(), self.index)
    }
}

impl FromStr for AbstractId {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let (prefix, index) = s.rsplit_once('_').ok_or(())?;
        let category = Category::ALL
            .into_iter()
            .find(|c| c.prefix() == prefix)
            .ok_or(())?;
        if index.is_empty() || index.starts_with('0') || !index.bytes().all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        let index = index.parse().map_err(|_| ())?;
        Ok(Self { category, index })
    }
}

/// Bidirectional association between abstract IDs and the raw identifiers
/// and literals they stand for. IDs within a category are dense and numbered
/// in order of first insertion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbstractionMap {
    forward: BTreeMap<AbstractId, String>,
    reverse: HashMap<(String, Category), AbstractId>,
    next: BTreeMap<Category, u32>,
}

impl AbstractionMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the ID for `raw` in `category`, assigning the next free index
    /// on first sight.
    pub fn intern(&mut self, raw: &str, category: Category) -> AbstractId {
        if let Some(id) = self.reverse.get(&(raw.to_string(), category)) {
            return *id;
        }
        let next = self.next.entry(category).or_insert(0);
        *next += 1;
        let id = AbstractId {
            category,
            index: *next,
        };
        self.forward.insert(id, raw.to_string());
        self.reverse.insert((raw.to_string(), category), id);
        id
    }

    pub fn raw(&self, id: &AbstractId) -> Option<&str> {
        self.forward.get(id).map(String::as_str)
    }

    pub fn lookup(&self, raw: &str, category: Category) -> Option<AbstractId> {
        self.reverse.get(&(raw.to_string(), category)).copied()
    }

    /// First ID bound to `raw` in any category, preferring identifier
    /// categories in [`Category::ALL`] order.
    pub fn lookup_any(&self, raw: &str) -> Option<AbstractId> {
        Category::ALL
            .into_iter()
            .find_map(|c| self.lookup(raw, c))
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AbstractId, &str)> {
        self.forward.iter().map(|(id, raw)| (id, raw.as_str()))
    }

    /// `ABSTRACT_ID<TAB>raw_text` lines, ordered by category then index.
    /// Tabs, newlines and backslashes in raw text are escaped.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (id, raw) in &self.forward {
            out.push_str(&id.to_string());
            out.push('\t');
            out.push_str(&escape(raw));
            out.push('\n');
        }
        out
    }

    pub fn from_lines(text: &str) -> Result<Self, AbstractionError> {
        let mut entries: Vec<(AbstractId, String)> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| AbstractionError::MapFormat {
                line: n + 1,
                reason: reason.to_string(),
            };
            let (id, raw) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let id: AbstractId = id.parse().map_err(|_| bad("malformed abstract id"))?;
            entries.push((id, unescape(raw).ok_or_else(|| bad("bad escape"))?));
        }
        entries.sort_by_key(|(id, _)| *id);
        let mut map = Self::new();
        for (id, raw) in entries {
            let assigned = map.intern(&raw, id.category);
            if assigned != id {
                return Err(AbstractionError::MapFormat {
                    line: 0,
                    reason: format!("ids are not dense or repeat a raw token near {id}"),
                });
            }
        }
        Ok(map)
    }
}

fn escape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(text: &str) -> Option<String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next()? {
            '\\' => out.push('\\'),
            't' => out.push('\t'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            _ => return None,
        }
    }
    Some(out)
}
