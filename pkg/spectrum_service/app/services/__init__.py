from .complexspec_service import complex_spectrum_service, winding_number
from .kernel_service import kernel_service
from .oracle_service import oracle_service
from .realspec_service import real_spectrum_service, refine_bracketed
from .slice_service import slice_service
from .timedomain_service import timedomain_service
from .verification_service import verification_service
