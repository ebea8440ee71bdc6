//! Grammar registry and the per-language table of composite-structure nodes.
//!
//! A composite node is a syntax node with a header followed by a body
//! (function and class definitions, `if`/`elif`/`else`, loops, `try`/`catch`,
//! `switch`/`case`). For each one the table says how to find where the body
//! starts; the header is everything between the node start and that offset.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GRAMMAR_DIR_ENV: &str = "LCR_GRAMMAR_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Python,
    Java,
    JavaScript,
    Go,
    Ruby,
    Php,
}

impl Language {
    pub const ALL: [Language; 6] = [
        Language::Python,
        Language::Java,
        Language::JavaScript,
        Language::Go,
        Language::Ruby,
        Language::Php,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Language::Python => "python",
            Language::Java => "java",
            Language::JavaScript => "javascript",
            Language::Go => "go",
            Language::Ruby => "ruby",
            Language::Php => "php",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Language::Python => "py",
            Language::Java => "java",
            Language::JavaScript => "js",
            Language::Go => "go",
            Language::Ruby => "rb",
            Language::Php => "php",
        }
    }

    pub fn from_extension(ext: &str) -> Option<Language> {
        Language::ALL.into_iter().find(|l| l.extension() == ext)
    }

    /// PHP snippets that start with `<?` use the full grammar. Snippets without the
    /// tag, common in extracted function corpora, use the tagless one.
    pub fn grammar_for(self, text: &str) -> tree_sitter::Language {
        match self {
            Language::Python => tree_sitter_python::LANGUAGE.into(),
            Language::Java => tree_sitter_java::LANGUAGE.into(),
            Language::JavaScript => tree_sitter_javascript::LANGUAGE.into(),
            Language::Go => tree_sitter_go::LANGUAGE.into(),
            Language::Ruby => tree_sitter_ruby::LANGUAGE.into(),
            Language::Php => {
                if text.trim_start().starts_with("<?") {
                    tree_sitter_php::LANGUAGE_PHP.into()
                } else {
                    tree_sitter_php::LANGUAGE_PHP_ONLY.into()
                }
            }
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "python" | "py" => Ok(Language::Python),
            "java" => Ok(Language::Java),
            "javascript" | "js" => Ok(Language::JavaScript),
            "go" | "golang" => Ok(Language::Go),
            "ruby" | "rb" => Ok(Language::Ruby),
            "php" => Ok(Language::Php),
            _ => Err(Error::UnsupportedLanguage(s.to_string())),
        }
    }
}

/// How to find the start of a composite node's body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyLocator {
    /// Start of the child in this field.
    Field(String),
    /// Start of the first child of this kind.
    Child(String),
    /// Start of the sibling that follows the first child of this kind.
    AfterChild(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeRule {
    pub kind: String,
    /// Tried in order; the first locator that resolves wins.
    pub body: Vec<BodyLocator>,
    /// Anonymous keyword children (e.g. `else` inside an `if` node in grammars
    /// without a dedicated else node) that open a clause of their own: marks go
    /// before the keyword and before the sibling following it.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clause_tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GrammarTable {
    pub composites: Vec<CompositeRule>,
}

impl GrammarTable {
    pub fn rule(&self, kind: &str) -> Option<&CompositeRule> {
        self.composites.iter().find(|r| r.kind == kind)
    }

    pub fn builtin(lang: Language) -> GrammarTable {
        use BodyLocator::*;
        let f = |name: &str| Field(name.to_string());
        let c = |kind: &str| Child(kind.to_string());
        let a = |kind: &str| AfterChild(kind.to_string());
        let rule = |kind: &str, body: Vec<BodyLocator>| CompositeRule {
            kind: kind.to_string(),
            body,
            clause_tokens: Vec::new(),
        };
        let with_else = |kind: &str, body: Vec<BodyLocator>| CompositeRule {
            kind: kind.to_string(),
            body,
            clause_tokens: vec!["else".to_string()],
        };
        let composites = match lang {
            Language::Python => vec![
                rule("decorated_definition", vec![f("definition")]),
                rule("function_definition", vec![f("body")]),
                rule("class_definition", vec![f("body")]),
                rule("if_statement", vec![f("consequence")]),
                rule("elif_clause", vec![f("consequence")]),
                rule("else_clause", vec![f("body")]),
                rule("for_statement", vec![f("body")]),
                rule("while_statement", vec![f("body")]),
                rule("try_statement", vec![f("body")]),
                rule("except_clause", vec![c("block")]),
                rule("finally_clause", vec![c("block")]),
                rule("with_statement", vec![f("body")]),
                rule("match_statement", vec![f("body")]),
                rule("case_clause", vec![f("consequence")]),
            ],
            Language::Java => vec![
                rule("class_declaration", vec![f("body")]),
                rule("interface_declaration", vec![f("body")]),
                rule("enum_declaration", vec![f("body")]),
                rule("record_declaration", vec![f("body")]),
                rule("method_declaration", vec![f("body")]),
                rule("constructor_declaration", vec![f("body")]),
                with_else("if_statement", vec![f("consequence")]),
                rule("for_statement", vec![f("body")]),
                rule("enhanced_for_statement", vec![f("body")]),
                rule("while_statement", vec![f("body")]),
                rule("do_statement", vec![f("body")]),
                rule("try_statement", vec![f("body")]),
                rule("try_with_resources_statement", vec![f("body")]),
                rule("catch_clause", vec![f("body")]),
                rule("finally_clause", vec![c("block")]),
                rule("switch_expression", vec![f("body")]),
                rule("switch_block_statement_group", vec![a(":"), a("->")]),
                rule("switch_rule", vec![a("->")]),
            ],
            Language::JavaScript => vec![
                rule("function_declaration", vec![f("body")]),
                rule("function_expression", vec![f("body")]),
                rule("generator_function_declaration", vec![f("body")]),
                rule("class_declaration", vec![f("body")]),
                rule("class", vec![f("body")]),
                rule("method_definition", vec![f("body")]),
                rule("if_statement", vec![f("consequence")]),
                rule("else_clause", vec![a("else")]),
                rule("for_statement", vec![f("body")]),
                rule("for_in_statement", vec![f("body")]),
                rule("while_statement", vec![f("body")]),
                rule("do_statement", vec![f("body")]),
                rule("try_statement", vec![f("body")]),
                rule("catch_clause", vec![f("body")]),
                rule("finally_clause", vec![f("body")]),
                rule("switch_statement", vec![f("body")]),
                rule("switch_case", vec![a(":")]),
                rule("switch_default", vec![a(":")]),
            ],
            Language::Go => vec![
                rule("function_declaration", vec![f("body")]),
                rule("method_declaration", vec![f("body")]),
                rule("func_literal", vec![f("body")]),
                with_else("if_statement", vec![f("consequence")]),
                rule("for_statement", vec![f("body")]),
                rule("expression_switch_statement", vec![c("{")]),
                rule("type_switch_statement", vec![c("{")]),
                rule("select_statement", vec![c("{")]),
                rule("expression_case", vec![a(":")]),
                rule("type_case", vec![a(":")]),
                rule("default_case", vec![a(":")]),
                rule("communication_case", vec![a(":")]),
            ],
            Language::Ruby => vec![
                rule("method", vec![f("body")]),
                rule("singleton_method", vec![f("body")]),
                rule("class", vec![f("body")]),
                rule("singleton_class", vec![f("body")]),
                rule("module", vec![f("body")]),
                rule("if", vec![f("consequence")]),
                rule("unless", vec![f("consequence")]),
                rule("elsif", vec![f("consequence")]),
                rule("else", vec![a("else")]),
                rule("while", vec![f("body")]),
                rule("until", vec![f("body")]),
                rule("for", vec![f("body")]),
                rule("case", vec![c("when"), c("in_clause")]),
                rule("when", vec![f("body")]),
                rule("begin", vec![a("begin")]),
                rule("rescue", vec![f("body")]),
                rule("ensure", vec![a("ensure")]),
                rule("do_block", vec![f("body")]),
            ],
            Language::Php => vec![
                rule("function_definition", vec![f("body")]),
                rule("anonymous_function", vec![f("body")]),
                rule("method_declaration", vec![f("body")]),
                rule("class_declaration", vec![f("body")]),
                rule("interface_declaration", vec![f("body")]),
                rule("trait_declaration", vec![f("body")]),
                rule("enum_declaration", vec![f("body")]),
                rule("if_statement", vec![f("body")]),
                rule("else_if_clause", vec![f("body")]),
                rule("else_clause", vec![f("body")]),
                rule("for_statement", vec![f("body")]),
                rule("foreach_statement", vec![f("body")]),
                rule("while_statement", vec![f("body")]),
                rule("do_statement", vec![f("body")]),
                rule("switch_statement", vec![f("body")]),
                rule("case_statement", vec![a(":"), a(";")]),
                rule("default_statement", vec![a(":"), a(";")]),
                rule("try_statement", vec![f("body")]),
                rule("catch_clause", vec![f("body")]),
                rule("finally_clause", vec![f("body")]),
            ],
        };
        GrammarTable { composites }
    }
}

/// Immutable set of grammar tables, shareable across threads.
#[derive(Debug, Clone)]
pub struct Grammars {
    tables: HashMap<Language, Arc<GrammarTable>>,
}

impl Grammars {
    pub fn builtin() -> Grammars {
        Grammars {
            tables: Language::ALL
                .into_iter()
                .map(|l| (l, Arc::new(GrammarTable::builtin(l))))
                .collect(),
        }
    }

    /// Built-in tables, with any `<language>.json` file found in `dir`
    /// replacing the table for that language.
    pub fn with_overrides(dir: &Path) -> Result<Grammars> {
        let mut grammars = Grammars::builtin();
        if !dir.is_dir() {
            return Err(Error::FileNotFound(dir.to_path_buf()));
        }
        for lang in Language::ALL {
            let path = dir.join(format!("{}.json", lang.name()));
            if path.is_file() {
                let table: GrammarTable = serde_json::from_slice(&std::fs::read(&path)?)?;
                log::info!("loaded grammar table for {lang} from {}", path.display());
                grammars.tables.insert(lang, Arc::new(table));
            }
        }
        Ok(grammars)
    }

    /// Tables from `$LCR_GRAMMAR_DIR` when set, otherwise the built-in ones.
    pub fn from_env() -> Result<Grammars> {
        match std::env::var_os(GRAMMAR_DIR_ENV) {
            Some(dir) => Grammars::with_overrides(Path::new(&dir)),
            None => Ok(Grammars::builtin()),
        }
    }

    pub fn table(&self, lang: Language) -> &GrammarTable {
        &self.tables[&lang]
    }
}

pub(crate) fn builtin_grammars() -> &'static Grammars {
    static BUILTIN: OnceLock<Grammars> = OnceLock::new();
    BUILTIN.get_or_init(Grammars::builtin)
}
