"""A node-and-tube dataflow language for programming a simulated world.

Programs are graphs of typed nodes joined by tubes. Each tick the whole graph
is evaluated; entity writes feed a deterministic grid world whose events feed
the next tick. Faults surface as diagnostics on nodes and tubes instead of
exceptions.
"""

from .values import (
    ANY,
    Color,
    DataType,
    PULSE,
    Value,
    boolean,
    class_ref,
    color,
    entity_ref,
    instance_ref,
    number,
    text,
)
from .graph import (
    ArithOp,
    Arithmetic,
    ClassNode,
    Compare,
    CompareOp,
    Conditional,
    Constant,
    ConstructorCall,
    Direction,
    EntityNode,
    EventHandler,
    EventKind,
    FunctionCall,
    GraphError,
    Logical,
    LogicOp,
    MethodCall,
    Node,
    NodeKind,
    Not,
    PortSpec,
    Program,
    Tube,
    TubeState,
    add_node,
    connect,
    detect_cycles,
    disconnect,
    expected_ports,
    make_node,
    set_constant,
    validate_program,
)
from .classes import (
    ClassDef,
    ClassError,
    ClassTable,
    FieldDef,
    FunctionDef,
    FunctionRegistry,
    Instance,
    MethodDef,
    define_class,
    instantiate,
    read_field,
    resolve_method,
    set_class_default,
)
from .evaluator import (
    ClassWrite,
    Diagnostic,
    DiagnosticCode,
    EvalContext,
    EvalResult,
    InspectReport,
    Severity,
    dispatch_event,
    evaluate,
    inspect,
)
from .world import (
    Avatar,
    Button,
    Cell,
    Command,
    ColumnMarker,
    Cube,
    Door,
    Elevator,
    EntityWrite,
    Grid,
    Heading,
    PasswordConsole,
    Robot,
    StepResult,
    Terrain,
    World,
    WorldError,
    WorldEvent,
    WorldView,
    configure_robot,
    snapshot,
    step,
    submit_password,
    validate_world,
)
from .natives import builtin_registry

__version__ = "0.1.0"
