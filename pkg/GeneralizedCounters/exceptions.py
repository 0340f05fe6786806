class ConfigurationError(ValueError):
    '''Invalid parameters, unknown names or missing config keys'''


class ContractViolation(RuntimeError):
    '''A caller broke a precondition (e.g. stepping from a terminal state)'''


class DivergenceError(ArithmeticError):
    '''A learner produced a non-finite TD error'''


class UnsupportedOperation(RuntimeError):
    pass


class OccupancyError(RuntimeError):
    '''The optimal policy does not absorb within the propagation horizon'''


class SchemaError(ValueError):
    pass
