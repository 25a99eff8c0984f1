"""Gauge and BRST transformation rules and the identity checks built on them"""
from transform.rules import RULE_SET_NAMES, RuleSet, TransformationRule, UnknownRuleSetError, rule_set
from transform.variation import MissingRuleError, brst_operator, vary
