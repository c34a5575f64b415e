def test_api_all():
    from spanner_forge import (
        ORACLE_CLASS_BY_NAME,
        CapacityError,
        ContractViolation,
        CreditExhausted,
        DegenerateInputError,
        GraphInstance,
        InfeasibleError,
        InputError,
        InvariantViolation,
        OracleQuery,
        PointSet,
        SeparatorImbalanceError,
        SpannerForgeError,
        WeightedGraph,
        __version__,
        build_subset_spanner,
        ell_close_spanner,
        held_karp,
        oracle_from_subset_spanner,
        run_ptas,
        settings,
        subset_tsp_dp,
        verify_stretch,
    )


def test_errors_derive_from_builtins():
    from spanner_forge import (
        InfeasibleError,
        InputError,
        InvariantViolation,
        SpannerForgeError,
    )

    assert issubclass(InputError, ValueError)
    assert issubclass(InvariantViolation, AssertionError)
    assert issubclass(InfeasibleError, SpannerForgeError)
    error = InfeasibleError("disconnected", pair=(1, 2))
    assert error.pair == (1, 2)
