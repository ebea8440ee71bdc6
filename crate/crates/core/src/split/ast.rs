//! Syntax-aware partition: marks are placed before and after the header of
//! every composite node met in a preorder walk, and the source is cut at them.

use std::collections::BTreeSet;

use tree_sitter::{Node, Parser, Tree};

use super::grammar::{BodyLocator, CompositeRule, GrammarTable, Language};
use super::{pieces_from_cuts, CodePiece};
use crate::error::{Error, Result};

pub fn parse(lang: Language, text: &str) -> Result<Tree> {
    let mut parser = Parser::new();
    parser
        .set_language(&lang.grammar_for(text))
        .map_err(|e| Error::ParseFailure(format!("{lang}: {e}")))?;
    let tree = parser
        .parse(text, None)
        .ok_or_else(|| Error::ParseFailure(lang.to_string()))?;
    if tree.root_node().is_error() {
        return Err(Error::ParseFailure(format!("{lang}: no structured tree")));
    }
    Ok(tree)
}

/// Byte offsets where the source is cut, collected in preorder.
pub fn split_marks(tree: &Tree, table: &GrammarTable) -> BTreeSet<usize> {
    let mut marks = BTreeSet::new();
    let mut cursor = tree.walk();
    loop {
        let node = cursor.node();
        if node.is_named() && node.start_byte() < node.end_byte() {
            if let Some(rule) = table.rule(node.kind()) {
                mark_composite(node, rule, &mut marks);
            }
        }
        if cursor.goto_first_child() {
            continue;
        }
        loop {
            if cursor.goto_next_sibling() {
                break;
            }
            if !cursor.goto_parent() {
                return marks;
            }
        }
    }
}

fn mark_composite(node: Node<'_>, rule: &CompositeRule, marks: &mut BTreeSet<usize>) {
    let start = node.start_byte();
    marks.insert(start);
    if let Some(body) = body_start(node, rule) {
        if body > start && body <= node.end_byte() {
            marks.insert(body);
        }
    }
    if rule.clause_tokens.is_empty() {
        return;
    }
    let mut cursor = node.walk();
    let children: Vec<Node<'_>> = node.children(&mut cursor).collect();
    for (i, child) in children.iter().enumerate() {
        if !child.is_named() && rule.clause_tokens.iter().any(|t| t == child.kind()) {
            marks.insert(child.start_byte());
            if let Some(next) = children.get(i + 1) {
                marks.insert(next.start_byte());
            }
        }
    }
}

/// Where the body of a composite node begins, i.e. the end of its header.
pub fn body_start(node: Node<'_>, rule: &CompositeRule) -> Option<usize> {
    rule.body.iter().find_map(|loc| match loc {
        BodyLocator::Field(name) => node.child_by_field_name(name).map(|n| n.start_byte()),
        BodyLocator::Child(kind) => {
            let mut cursor = node.walk();
            let found = node.children(&mut cursor).find(|c| c.kind() == kind);
            found.map(|n| n.start_byte())
        }
        BodyLocator::AfterChild(kind) => {
            let mut cursor = node.walk();
            let found = node.children(&mut cursor).find(|c| c.kind() == kind);
            found.map(|n| n.next_sibling().map_or(n.end_byte(), |s| s.start_byte()))
        }
    })
}

/// Start offsets of every composite node in the tree.
pub fn composite_starts(tree: &Tree, table: &GrammarTable) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![tree.root_node()];
    while let Some(node) = stack.pop() {
        if node.is_named() && node.start_byte() < node.end_byte() && table.rule(node.kind()).is_some() {
            out.push(node.start_byte());
        }
        let mut cursor = node.walk();
        stack.extend(node.children(&mut cursor));
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn partition(lang: Language, text: &str, table: &GrammarTable) -> Result<Vec<CodePiece>> {
    let tree = parse(lang, text)?;
    let marks = split_marks(&tree, table);
    Ok(pieces_from_cuts(text, marks.into_iter()))
}
