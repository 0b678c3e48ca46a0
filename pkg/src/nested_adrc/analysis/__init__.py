from .lyapunov import (
    LyapunovResult,
    NotHurwitzError,
    companion_matrix,
    jacobi_eigenvalues,
    solve_lyapunov,
    theorem1_bound,
)
from .metrics import Metrics, isu, itae
from .noise import gaussian_noise
from .verification import (
    BoundReport,
    BoundRow,
    Lemma2Report,
    estimate_rate_bound,
    lemma2_check,
    verify_theorem1,
)
