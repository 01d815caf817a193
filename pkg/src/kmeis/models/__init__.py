from .base import Base
from .run_record import RunRecord
