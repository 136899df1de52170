class EnvelopesError(Exception):
    """Базовое исключение проекта"""


class ContractViolation(EnvelopesError, ValueError):
    """Нарушено предусловие операции (длины, диапазоны, недопустимые параметры)"""


class OracleRefusal(ContractViolation):
    """Эталонный решатель отказывается работать на слишком длинном ряде"""


class InvariantError(EnvelopesError, RuntimeError):
    """Нарушен внутренний инвариант алгоритма (указатели, аудит отсечения)"""


class DataParseError(EnvelopesError):
    """Ошибка разбора входного файла"""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        location = ''
        if path is not None:
            location = f'{path}'
        if line is not None:
            location = f'{location}:{line}' if location else f'line {line}'
        super().__init__(f'{location}: {message}' if location else message)
