class AdrcException(Exception):
    def __init__(self, message) -> None:
        super().__init__(message)
        self.message = message


class ConfigException(AdrcException):
    def __init__(self, field, message) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class PolynomialException(AdrcException):
    def __init__(self, message) -> None:
        super().__init__(message)


class DivergenceException(AdrcException):
    def __init__(self, message) -> None:
        super().__init__(message)


class ObserverDivergedException(DivergenceException):
    def __init__(self, message, index=None) -> None:
        super().__init__(message)
        self.index = index


class VerificationException(AdrcException):
    def __init__(self, message, failed=()) -> None:
        super().__init__(message)
        self.failed = tuple(failed)
