from disc.rationals import ExtendedRational, to_fraction
from util.exceptions import ValidationException


def is_not_none(value) -> None:
    if value is None:
        raise ValidationException("Value is empty")


def is_not_blank(value) -> None:
    if (value is None) or (not str(value).strip()):
        raise ValidationException("Value is blank")


def is_positive_integer(value) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise ValidationException(f"Value [{value}] is not a positive integer")


def is_exact_rational(value) -> None:
    if isinstance(value, float):
        raise ValidationException(f"Value [{value}] is a float; write it as an integer or a \"p/q\" string")
    try:
        to_fraction(value)
    except (TypeError, ValueError):
        raise ValidationException(f"Value [{value}] is not a rational")


def is_extended_rational(value) -> None:
    if isinstance(value, float):
        raise ValidationException(f"Value [{value}] is a float; write it as an integer or a \"p/q\" string")
    try:
        ExtendedRational(value)
    except (TypeError, ValueError):
        raise ValidationException(f"Value [{value}] is neither a rational nor inf/-inf")


def is_mapping(value) -> None:
    if not isinstance(value, dict):
        raise ValidationException(f"Value [{value}] is not a mapping")


def is_list(value) -> None:
    if not isinstance(value, list):
        raise ValidationException(f"Value [{value}] is not a list")


def validate_value(field: str, value, validation_funcs) -> None:
    try:
        for validation_func in validation_funcs:
            validation_func(value)
    except ValidationException as e:
        raise ValidationException(f"Field: [{field}]. Validation message: {str(e)}")
