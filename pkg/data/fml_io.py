"""
Fuzzy Markup Language (IEEE 1855 subset) reader and writer.

Supported: fuzzySystem / knowledgeBase / fuzzyVariable / fuzzyTerm /
trapezoidShape, and a Mamdani rule base whose rules carry
<antecedent><clause><variable/><term/></clause></antecedent> and
<consequent><then><clause>...</clause></then></consequent> children.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from lxml import etree

from config import config
from core.exceptions import (
    DanglingReference, InvalidSystem, MalformedXml, MissingAttribute, UnknownElement, UnknownShape,
)
from core.fuzzy_system import validate
from data.models import (
    ConceptAttributes, FuzzySystem, FuzzyTerm, FuzzyVariable, Hedge, Rule, TrapezoidShape, VariableKind,
)

logger = logging.getLogger(__name__)

FML_NAMESPACE = "http://www.learnlib.org"
RULE_BASE_TAGS = ("mamdaniRuleBase", "mandaniRuleBase")
SHAPE_TAGS = ("triangleShape", "leftLinearShape", "rightLinearShape", "piShape", "gaussianShape",
              "leftGaussianShape", "rightGaussianShape", "sShape", "zShape", "rectangularShape",
              "singletonShape", "circularDefinition", "customShape", "pointSetShape")


def _local(element) -> str:
    return etree.QName(element).localname


def _attributes(element) -> Dict[str, str]:
    """Attribute map keyed by lowercase local name."""
    return {etree.QName(key).localname.lower(): value for key, value in element.attrib.items()}


def _required(attrs: Dict[str, str], key: str, where: str) -> str:
    value = attrs.get(key.lower())
    if value is None:
        raise MissingAttribute(f"{where}: missing attribute {key}")
    return value


def _number(attrs: Dict[str, str], key: str, where: str, default: Optional[float] = None) -> float:
    if default is not None and key.lower() not in attrs:
        return default
    raw = _required(attrs, key, where)
    try:
        return float(raw)
    except ValueError:
        raise MissingAttribute(f"{where}: attribute {key}={raw!r} is not a number")


def _sub(parent, tag: str, **attrs):
    """Child element in the FML namespace."""
    return etree.SubElement(parent, f"{{{FML_NAMESPACE}}}{tag}", **attrs)


def format_number(value: float) -> str:
    """Up to 15 significant digits, more only when needed to round-trip."""
    text = format(float(value), ".15g")
    if float(text) != float(value):
        text = repr(float(value))
    return text


class FmlParser:
    """Parses FML documents into FuzzySystem objects."""

    def __init__(self, strict: Optional[bool] = None):
        self.strict = config.FML_STRICT if strict is None else strict

    def _unexpected(self, element, parent: str):
        message = f"Unexpected element <{_local(element)}> inside <{parent}>"
        if self.strict:
            raise UnknownElement(message)
        logger.warning(f"{message}; skipped")

    def parse(self, document) -> FuzzySystem:
        """Parse an FML document (text or bytes) into a validated system."""
        if isinstance(document, str):
            document = document.encode("utf-8")
        try:
            parser = etree.XMLParser(resolve_entities=False, no_network=True)
            root = etree.fromstring(document, parser=parser)
        except etree.XMLSyntaxError as e:
            raise MalformedXml(f"Invalid FML document: {e}")
        if _local(root) != "fuzzySystem":
            raise MalformedXml(f"Root element is <{_local(root)}>, expected <fuzzySystem>")

        attrs = _attributes(root)
        name = _required(attrs, "name", "fuzzySystem")
        variables: List[FuzzyVariable] = []
        rules: List[Rule] = []
        seen_rule_base = False
        for child in root:
            if not isinstance(child.tag, str):
                continue  # comments / processing instructions
            tag = _local(child)
            if tag == "knowledgeBase":
                variables.extend(self._knowledge_base(child))
            elif tag in RULE_BASE_TAGS:
                seen_rule_base = True
                rules.extend(self._rule_base(child, variables))
            else:
                self._unexpected(child, "fuzzySystem")
        if not seen_rule_base:
            logger.warning(f"FML system {name} has no rule base")

        system = FuzzySystem(name=name, variables=tuple(variables), rules=tuple(rules),
                             network_address=attrs.get("networkaddress", "127.0.0.1"))
        violations = validate(system)
        if violations:
            raise InvalidSystem(violations)
        return system

    def _knowledge_base(self, element) -> List[FuzzyVariable]:
        variables = []
        for child in element:
            if not isinstance(child.tag, str):
                continue
            if _local(child) == "fuzzyVariable":
                variables.append(self._variable(child))
            else:
                self._unexpected(child, "knowledgeBase")
        return variables

    def _variable(self, element) -> FuzzyVariable:
        attrs = _attributes(element)
        name = _required(attrs, "name", "fuzzyVariable")
        where = f"fuzzyVariable {name}"
        kind_raw = _required(attrs, "type", where)
        try:
            kind = VariableKind(kind_raw.capitalize())
        except ValueError:
            raise MissingAttribute(f"{where}: unknown type {kind_raw!r}")
        terms = []
        for child in element:
            if not isinstance(child.tag, str):
                continue
            if _local(child) == "fuzzyTerm":
                terms.append(self._term(child, name))
            else:
                self._unexpected(child, "fuzzyVariable")
        return FuzzyVariable(
            name=name,
            domain_left=_number(attrs, "domainLeft", where),
            domain_right=_number(attrs, "domainRight", where),
            kind=kind,
            terms=tuple(terms),
            accumulation=attrs.get("accumulation", "MAX").upper(),
            defuzzifier=attrs.get("defuzzifier", "COG").upper(),
            default_value=_number(attrs, "defaultValue", where, default=0.0),
        )

    def _term(self, element, variable: str) -> FuzzyTerm:
        attrs = _attributes(element)
        name = _required(attrs, "name", f"fuzzyTerm of {variable}")
        where = f"fuzzyTerm {variable}/{name}"
        shape = None
        for child in element:
            if not isinstance(child.tag, str):
                continue
            tag = _local(child)
            if tag == "trapezoidShape":
                shape_attrs = _attributes(child)
                shape = TrapezoidShape(*(_number(shape_attrs, f"param{i}", where) for i in range(1, 5)))
            elif tag in SHAPE_TAGS or tag.endswith("Shape"):
                raise UnknownShape(f"{where}: unsupported shape <{tag}>")
            else:
                self._unexpected(child, "fuzzyTerm")
        if shape is None:
            raise MissingAttribute(f"{where}: no trapezoidShape")
        hedge_raw = attrs.get("hedge", Hedge.NONE.value)
        try:
            hedge = Hedge(hedge_raw)
        except ValueError:
            raise MissingAttribute(f"{where}: unknown hedge {hedge_raw!r}")
        meta_values = {key: attrs.get(key) for key in ("area", "grade", "subject")}
        meta = ConceptAttributes(**meta_values) if any(v is not None for v in meta_values.values()) else None
        return FuzzyTerm(
            name=name,
            shape=shape,
            complement=attrs.get("complement", "false").strip().lower() == "true",
            hedge=hedge,
            meta=meta,
        )

    def _rule_base(self, element, variables: List[FuzzyVariable]) -> List[Rule]:
        known = {var.name: set(var.term_names) for var in variables}
        rules = []
        for child in element:
            if not isinstance(child.tag, str):
                continue
            if _local(child) == "rule":
                rule = self._rule(child)
                for var_name, term_name in rule.antecedent + (rule.consequent,):
                    if term_name not in known.get(var_name, ()):
                        raise DanglingReference(
                            f"rule {rule.name}: unknown variable/term {var_name}/{term_name}")
                rules.append(rule)
            else:
                self._unexpected(child, "ruleBase")
        return rules

    def _clauses(self, element, where: str) -> List[Tuple[str, str]]:
        clauses = []
        for clause in element:
            if not isinstance(clause.tag, str):
                continue
            if _local(clause) != "clause":
                self._unexpected(clause, where)
                continue
            parts = {_local(part): (part.text or "").strip() for part in clause if isinstance(part.tag, str)}
            if not parts.get("variable") or not parts.get("term"):
                raise MissingAttribute(f"{where}: clause needs <variable> and <term>")
            clauses.append((parts["variable"], parts["term"]))
        return clauses

    def _rule(self, element) -> Rule:
        attrs = _attributes(element)
        name = _required(attrs, "name", "rule")
        where = f"rule {name}"
        antecedent: List[Tuple[str, str]] = []
        consequent: List[Tuple[str, str]] = []
        for child in element:
            if not isinstance(child.tag, str):
                continue
            tag = _local(child)
            if tag == "antecedent":
                antecedent.extend(self._clauses(child, where))
            elif tag == "consequent":
                for part in child:
                    if not isinstance(part.tag, str):
                        continue
                    if _local(part) == "then":
                        consequent.extend(self._clauses(part, where))
                    elif _local(part) == "clause":
                        consequent.extend(self._clauses(child, where))
                        break
                    else:
                        self._unexpected(part, "consequent")
            else:
                self._unexpected(child, "rule")
        if len(consequent) != 1:
            raise MissingAttribute(f"{where}: expected exactly one consequent clause, found {len(consequent)}")
        return Rule(
            name=name,
            antecedent=tuple(antecedent),
            consequent=consequent[0],
            weight=_number(attrs, "weight", where, default=1.0),
            connector=attrs.get("connector", "AND").upper(),
            and_method=attrs.get("andmethod", "MIN").upper(),
            or_method=attrs.get("ormethod", "MAX").upper(),
        )


class FmlWriter:
    """Serializes FuzzySystem objects as FML documents."""

    def serialize(self, system: FuzzySystem) -> bytes:
        violations = validate(system)
        if violations:
            raise InvalidSystem(violations)
        address = system.network_address
        root = etree.Element(f"{{{FML_NAMESPACE}}}fuzzySystem", nsmap={None: FML_NAMESPACE})
        root.set("name", system.name)
        root.set("networkAddress", address)

        kb = _sub(root, "knowledgeBase", networkAddress=address)
        for var in system.variables:
            var_el = _sub(kb, "fuzzyVariable")
            var_el.set("name", var.name)
            var_el.set("domainLeft", format_number(var.domain_left))
            var_el.set("domainRight", format_number(var.domain_right))
            var_el.set("type", var.kind.value)
            var_el.set("accumulation", var.accumulation)
            var_el.set("defuzzifier", var.defuzzifier)
            var_el.set("defaultValue", format_number(var.default_value))
            var_el.set("networkAddress", address)
            for term in var.terms:
                term_el = _sub(var_el, "fuzzyTerm")
                term_el.set("name", term.name)
                term_el.set("complement", "true" if term.complement else "false")
                if term.hedge != Hedge.NONE:
                    term_el.set("hedge", term.hedge.value)
                if term.meta is not None:
                    for key, value in term.meta.items():
                        term_el.set(key, value)
                shape_el = _sub(term_el, "trapezoidShape")
                for i, param in enumerate(term.shape.as_tuple(), start=1):
                    shape_el.set(f"param{i}", format_number(param))

        rb = _sub(root, "mamdaniRuleBase")
        rb.set("name", system.name)
        rb.set("activationMethod", "MIN")
        rb.set("andMethod", "MIN")
        rb.set("orMethod", "MAX")
        rb.set("networkAddress", address)
        for rule in system.rules:
            rule_el = _sub(rb, "rule")
            rule_el.set("name", rule.name)
            rule_el.set("andMethod", rule.and_method)
            rule_el.set("orMethod", rule.or_method)
            rule_el.set("connector", rule.connector)
            rule_el.set("weight", format_number(rule.weight))
            rule_el.set("networkAddress", address)
            antecedent = _sub(rule_el, "antecedent")
            for var_name, term_name in rule.antecedent:
                self._clause(antecedent, var_name, term_name)
            then = _sub(_sub(rule_el, "consequent"), "then")
            self._clause(then, *rule.consequent)

        return etree.tostring(root, xml_declaration=True, encoding="UTF-8", pretty_print=True)

    @staticmethod
    def _clause(parent, var_name: str, term_name: str):
        clause = _sub(parent, "clause")
        _sub(clause, "variable").text = var_name
        _sub(clause, "term").text = term_name


fml_writer = FmlWriter()


def parse_fml(document, strict: Optional[bool] = None) -> FuzzySystem:
    return FmlParser(strict=strict).parse(document)


def serialize_fml(system: FuzzySystem) -> bytes:
    return fml_writer.serialize(system)


def load_fml(path, strict: Optional[bool] = None) -> FuzzySystem:
    """Read and parse an FML file."""
    data = Path(path).read_bytes()
    system = parse_fml(data, strict=strict)
    logger.info(f"Loaded FML system {system.name} from {path} "
                f"({len(system.variables)} variables, {len(system.rules)} rules)")
    return system


def save_fml(system: FuzzySystem, path):
    """Serialize a system to an FML file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(serialize_fml(system))
    logger.info(f"Saved FML system {system.name} to {path}")
