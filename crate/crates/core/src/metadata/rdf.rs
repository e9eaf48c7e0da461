//! RDF/XML subset used by `metadata.rdf`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{
    Creator, DescriptionBlock, MetadataError, MetadataSet, Object, Reference, W3cDateTime,
    BQBIOL_NS, BQMODEL_NS, DCTERMS_NS, RDF_NS, VCARD_NS,
};
use crate::xml::{self, Element};

const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";

/// Prefixes used when writing well-known predicate namespaces.
const KNOWN_PREFIXES: [(&str, &str); 4] = [
    (BQMODEL_NS, "bqmodel"),
    (BQBIOL_NS, "bqbiol"),
    ("http://purl.org/dc/elements/1.1/", "dc"),
    ("http://xmlns.com/foaf/0.1/", "foaf"),
];

pub(super) fn parse(bytes: &[u8]) -> Result<MetadataSet, MetadataError> {
    let root = xml::parse_document(bytes).map_err(|e| MetadataError::MalformedXml(e.0))?;
    if !root.is(RDF_NS, "RDF") {
        return Err(MetadataError::NotRdf);
    }
    let mut set = MetadataSet::new();
    for node in root.elements() {
        if !node.is(RDF_NS, "Description") {
            return Err(MetadataError::Unsupported(format!(
                "typed node `{}`",
                qualified(node)
            )));
        }
        set.insert(parse_description(node)?);
    }
    Ok(set)
}

fn qualified(element: &Element) -> String {
    format!("{}{}", element.ns.as_deref().unwrap_or(""), element.local)
}

fn rdf_attr<'a>(element: &'a Element, local: &str) -> Option<&'a str> {
    element.attr(Some(RDF_NS), local)
}

fn parse_description(element: &Element) -> Result<DescriptionBlock, MetadataError> {
    let about = rdf_attr(element, "about").ok_or_else(|| {
        MetadataError::Unsupported("rdf:Description without rdf:about".to_string())
    })?;
    let mut block = DescriptionBlock::new(about)?;

    for attr in &element.attrs {
        match attr.ns.as_deref() {
            None | Some(RDF_NS) | Some(XML_NS) => {}
            Some(ns) => block.references.push(Reference::literal(
                format!("{ns}{}", attr.local),
                attr.value.trim(),
            )),
        }
    }
    for property in element.elements() {
        parse_property(&mut block, property)?;
    }
    Ok(block)
}

fn literal(element: &Element) -> String {
    element.text().trim().to_string()
}

/// Child properties of a node given inline, either through
/// `rdf:parseType="Resource"` or a nested anonymous `rdf:Description`.
fn resource_body(element: &Element) -> Option<Vec<&Element>> {
    if rdf_attr(element, "parseType") == Some("Resource") {
        return Some(element.elements().collect());
    }
    let children: Vec<&Element> = element.elements().collect();
    match children.as_slice() {
        [only] if only.is(RDF_NS, "Description") => Some(only.elements().collect()),
        _ => None,
    }
}

fn parse_property(block: &mut DescriptionBlock, property: &Element) -> Result<(), MetadataError> {
    let Some(ns) = property.ns.as_deref() else {
        return Err(MetadataError::Unsupported(format!(
            "property `{}` without namespace",
            property.local
        )));
    };
    let predicate = format!("{ns}{}", property.local);
    if let Some(kind) = rdf_attr(property, "parseType") {
        if kind != "Resource" {
            return Err(MetadataError::Unsupported(format!(
                "rdf:parseType=\"{kind}\" on `{predicate}`"
            )));
        }
    }
    if rdf_attr(property, "nodeID").is_some() {
        return Err(MetadataError::Unsupported(format!(
            "rdf:nodeID on `{predicate}`"
        )));
    }

    if ns == DCTERMS_NS {
        match property.local.as_str() {
            "description" if rdf_attr(property, "resource").is_none() => {
                if !property.has_element_children() {
                    let text = literal(property);
                    if block.description.is_none() {
                        block.description = Some(text);
                    } else {
                        block.references.push(Reference::literal(predicate, text));
                    }
                    return Ok(());
                }
            }
            "creator" if rdf_attr(property, "resource").is_none() => {
                if let Some(body) = resource_body(property) {
                    let creator = parse_creator(&body);
                    if !creator.is_empty() {
                        block.creators.push(creator);
                    }
                    return Ok(());
                }
            }
            "created" => {
                let when = timestamp(property)?;
                if block.created.is_none() {
                    block.created = Some(when);
                } else {
                    block
                        .references
                        .push(Reference::literal(predicate, when.to_string()));
                }
                return Ok(());
            }
            "modified" => {
                block.modified.push(timestamp(property)?);
                return Ok(());
            }
            _ => {}
        }
    }

    if let Some(resource) = rdf_attr(property, "resource") {
        block
            .references
            .push(Reference::resource(predicate, resource));
        return Ok(());
    }
    let children: Vec<&Element> = property.elements().collect();
    match children.as_slice() {
        [] if rdf_attr(property, "parseType").is_none() => {
            block
                .references
                .push(Reference::literal(predicate, literal(property)));
            Ok(())
        }
        [container]
            if container.ns.as_deref() == Some(RDF_NS)
                && matches!(container.local.as_str(), "Bag" | "Seq" | "Alt") =>
        {
            // Container membership is flattened into one reference per item.
            for item in container.elements() {
                if !item.is(RDF_NS, "li") {
                    return Err(MetadataError::Unsupported(format!(
                        "`{}` inside rdf:{}",
                        qualified(item),
                        container.local
                    )));
                }
                let object = match rdf_attr(item, "resource") {
                    Some(uri) => Object::Resource(uri.to_string()),
                    None if !item.has_element_children() => Object::Literal(literal(item)),
                    None => {
                        return Err(MetadataError::Unsupported(format!(
                            "structured rdf:li under `{predicate}`"
                        )))
                    }
                };
                block.references.push(Reference {
                    predicate: predicate.clone(),
                    object,
                });
            }
            Ok(())
        }
        _ => Err(MetadataError::Unsupported(format!(
            "structured value of `{predicate}`"
        ))),
    }
}

fn timestamp(property: &Element) -> Result<W3cDateTime, MetadataError> {
    let raw = match resource_body(property) {
        Some(body) => body
            .iter()
            .find(|e| e.is(DCTERMS_NS, "W3CDTF") || e.is(RDF_NS, "value"))
            .map(|e| literal(e))
            .ok_or_else(|| {
                MetadataError::Unsupported(format!(
                    "`{}` without a dcterms:W3CDTF value",
                    qualified(property)
                ))
            })?,
        None => literal(property),
    };
    Ok(W3cDateTime::parse(&raw)?)
}

fn resource_or_literal(element: &Element) -> String {
    rdf_attr(element, "resource")
        .map(str::to_string)
        .unwrap_or_else(|| literal(element))
}

fn parse_creator(body: &[&Element]) -> Creator {
    let mut creator = Creator::default();
    let apply_name = |creator: &mut Creator, element: &Element| match element.local.as_str() {
        "family-name" => creator.family_name = Some(literal(element)),
        "given-name" => creator.given_name = Some(literal(element)),
        _ => {}
    };
    for element in body {
        if element.ns.as_deref() != Some(VCARD_NS) {
            continue;
        }
        match element.local.as_str() {
            "hasName" | "n" => {
                for part in resource_body(element).unwrap_or_default() {
                    if part.ns.as_deref() == Some(VCARD_NS) {
                        apply_name(&mut creator, part);
                    }
                }
            }
            "family-name" | "given-name" => apply_name(&mut creator, element),
            "hasEmail" | "email" => {
                let value = resource_or_literal(element);
                let value = value.strip_prefix("mailto:").unwrap_or(&value);
                creator.email = Some(value.to_string());
            }
            "organization-name" => creator.organization = Some(literal(element)),
            "hasURL" | "url" => creator.url = Some(resource_or_literal(element)),
            _ => {}
        }
    }
    creator
}

struct Prefixes {
    by_ns: BTreeMap<String, String>,
}

impl Prefixes {
    fn collect(set: &MetadataSet) -> Result<Self, MetadataError> {
        let mut by_ns: BTreeMap<String, String> = [
            (RDF_NS, "rdf"),
            (DCTERMS_NS, "dcterms"),
            (VCARD_NS, "vCard"),
        ]
        .into_iter()
        .map(|(ns, p)| (ns.to_string(), p.to_string()))
        .collect();

        let mut unknown = Vec::new();
        for block in set.blocks() {
            for reference in &block.references {
                let (ns, _) = split_predicate(&reference.predicate)?;
                if by_ns.contains_key(ns) {
                    continue;
                }
                match KNOWN_PREFIXES.iter().find(|(known, _)| *known == ns) {
                    Some((_, prefix)) => {
                        by_ns.insert(ns.to_string(), prefix.to_string());
                    }
                    None => unknown.push(ns.to_string()),
                }
            }
        }
        unknown.sort();
        unknown.dedup();
        for (i, ns) in unknown.into_iter().enumerate() {
            by_ns.insert(ns, format!("ns{}", i + 1));
        }
        Ok(Prefixes { by_ns })
    }

    fn qname(&self, predicate: &str) -> Result<String, MetadataError> {
        let (ns, local) = split_predicate(predicate)?;
        Ok(format!("{}:{local}", self.by_ns[ns]))
    }

    /// Declarations in a fixed order: rdf, dcterms, vCard, then the rest by
    /// prefix.
    fn declarations(&self) -> Vec<(&str, &str)> {
        let mut decls: Vec<(&str, &str)> = self
            .by_ns
            .iter()
            .map(|(ns, p)| (p.as_str(), ns.as_str()))
            .collect();
        let rank = |p: &str| match p {
            "rdf" => 0,
            "dcterms" => 1,
            "vCard" => 2,
            _ => 3,
        };
        decls.sort_by(|a, b| rank(a.0).cmp(&rank(b.0)).then(a.0.cmp(b.0)));
        decls
    }
}

fn split_predicate(predicate: &str) -> Result<(&str, &str), MetadataError> {
    let at = predicate.rfind(['#', '/']).ok_or_else(|| {
        MetadataError::InvalidMetadata(format!("predicate `{predicate}` has no namespace"))
    })?;
    let (ns, local) = predicate.split_at(at + 1);
    if !is_ncname(local) {
        return Err(MetadataError::InvalidMetadata(format!(
            "predicate `{predicate}` cannot be written as an XML element name"
        )));
    }
    Ok((ns, local))
}

fn is_ncname(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || matches!(c, '-' | '.' | '_'))
}

pub(super) fn serialize(set: &MetadataSet) -> Result<Vec<u8>, MetadataError> {
    let prefixes = Prefixes::collect(set)?;
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<rdf:RDF");
    for (i, (prefix, ns)) in prefixes.declarations().into_iter().enumerate() {
        let sep = if i == 0 { " " } else { "\n  " };
        write!(out, "{sep}xmlns:{prefix}=\"{}\"", xml::escape(ns)).unwrap();
    }
    if set.is_empty() {
        out.push_str("/>\n");
        return Ok(out.into_bytes());
    }
    out.push_str(">\n");
    for block in set.blocks() {
        write_block(&mut out, &prefixes, block)?;
    }
    out.push_str("</rdf:RDF>\n");
    Ok(out.into_bytes())
}

fn write_block(
    out: &mut String,
    prefixes: &Prefixes,
    block: &DescriptionBlock,
) -> Result<(), MetadataError> {
    writeln!(
        out,
        "  <rdf:Description rdf:about=\"{}\">",
        xml::escape(block.about())
    )
    .unwrap();
    if let Some(description) = &block.description {
        writeln!(
            out,
            "    <dcterms:description>{}</dcterms:description>",
            xml::escape(description)
        )
        .unwrap();
    }
    for creator in &block.creators {
        write_creator(out, creator)?;
    }
    let write_time = |out: &mut String, element: &str, when: &W3cDateTime| {
        writeln!(out, "    <dcterms:{element} rdf:parseType=\"Resource\">").unwrap();
        writeln!(out, "      <dcterms:W3CDTF>{when}</dcterms:W3CDTF>").unwrap();
        writeln!(out, "    </dcterms:{element}>").unwrap();
    };
    if let Some(created) = &block.created {
        write_time(out, "created", created);
    }
    for modified in &block.modified {
        write_time(out, "modified", modified);
    }
    for reference in &block.references {
        let qname = prefixes.qname(&reference.predicate)?;
        match &reference.object {
            Object::Resource(uri) => {
                writeln!(out, "    <{qname} rdf:resource=\"{}\"/>", xml::escape(uri)).unwrap()
            }
            Object::Literal(text) => {
                writeln!(out, "    <{qname}>{}</{qname}>", xml::escape(text)).unwrap()
            }
        }
    }
    out.push_str("  </rdf:Description>\n");
    Ok(())
}

fn write_creator(out: &mut String, creator: &Creator) -> Result<(), MetadataError> {
    if creator.is_empty() {
        return Err(MetadataError::InvalidMetadata(
            "creator without any field".into(),
        ));
    }
    out.push_str("    <dcterms:creator rdf:parseType=\"Resource\">\n");
    if creator.family_name.is_some() || creator.given_name.is_some() {
        out.push_str("      <vCard:hasName rdf:parseType=\"Resource\">\n");
        if let Some(family) = &creator.family_name {
            writeln!(
                out,
                "        <vCard:family-name>{}</vCard:family-name>",
                xml::escape(family)
            )
            .unwrap();
        }
        if let Some(given) = &creator.given_name {
            writeln!(
                out,
                "        <vCard:given-name>{}</vCard:given-name>",
                xml::escape(given)
            )
            .unwrap();
        }
        out.push_str("      </vCard:hasName>\n");
    }
    if let Some(email) = &creator.email {
        let uri = if email.contains(':') {
            email.clone()
        } else {
            format!("mailto:{email}")
        };
        writeln!(
            out,
            "      <vCard:hasEmail rdf:resource=\"{}\"/>",
            xml::escape(&uri)
        )
        .unwrap();
    }
    if let Some(organization) = &creator.organization {
        writeln!(
            out,
            "      <vCard:organization-name>{}</vCard:organization-name>",
            xml::escape(organization)
        )
        .unwrap();
    }
    if let Some(url) = &creator.url {
        writeln!(
            out,
            "      <vCard:hasURL rdf:resource=\"{}\"/>",
            xml::escape(url)
        )
        .unwrap();
    }
    out.push_str("    </dcterms:creator>\n");
    Ok(())
}
