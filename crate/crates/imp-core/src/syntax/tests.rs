use super::*;

fn v(s: &str) -> AExpr {
    AExpr::Var(ident(s))
}

fn n(k: i64) -> AExpr {
    AExpr::num(k)
}

#[test]
fn ident_validation() {
    assert!(Ident::new("x").is_ok());
    assert!(Ident::new("_a9").is_ok());
    assert_eq!(Ident::new(""), Err(IdentError::Empty));
    assert!(matches!(Ident::new("9x"), Err(IdentError::InvalidChar(_))));
    assert!(matches!(Ident::new("a-b"), Err(IdentError::InvalidChar(_))));
    assert_eq!(Ident::new("while"), Err(IdentError::Keyword("while".into())));
    assert_eq!(Ident::new("skip"), Err(IdentError::Keyword("skip".into())));
}

#[test]
fn parse_instr_skip() {
    assert_eq!(parse_instr("skip").unwrap(), AInstr::Skip);
}

#[test]
fn parse_instr_annotated_sum_program() {
    let got = parse_instr("while x < n do [le(x,n) /\\ pp(y,x)] x:=x+1; y:=x+y done").unwrap();
    let want = AInstr::while_loop(
        BExpr::lt(v("x"), v("n")),
        Assert::conj(
            Assert::Pred(ident("le"), vec![v("x"), v("n")]),
            Assert::Pred(ident("pp"), vec![v("y"), v("x")]),
        ),
        AInstr::seq(
            AInstr::Assign(ident("x"), AExpr::plus(v("x"), n(1))),
            AInstr::Assign(ident("y"), AExpr::plus(v("x"), v("y"))),
        ),
    );
    assert_eq!(got, want);
}

#[test]
fn parse_instr_right_nested_seq() {
    let got = parse_instr("x:=1; y:=2").unwrap();
    let want = AInstr::seq(
        AInstr::Assign(ident("x"), n(1)),
        AInstr::Assign(ident("y"), n(2)),
    );
    assert_eq!(got, want);

    let three = parse_instr("x:=1; y:=2; z:=3").unwrap();
    match three {
        AInstr::Seq(_, rest) => assert!(matches!(*rest, AInstr::Seq(..))),
        other => panic!("expected right-nested seq, got {other:?}"),
    }
}

#[test]
fn parse_instr_requires_invariant_bracket() {
    assert!(parse_instr("while x < n do x:=x+1 done").is_err());
}

#[test]
fn parse_bare_examples() {
    assert_eq!(parse_bare("skip").unwrap(), Instr::Skip);
    let got = parse_bare("while x < n do x:=x+1; y:=x+y done").unwrap();
    let want = Instr::while_loop(
        BExpr::lt(v("x"), v("n")),
        Instr::seq(
            Instr::Assign(ident("x"), AExpr::plus(v("x"), n(1))),
            Instr::Assign(ident("y"), AExpr::plus(v("x"), v("y"))),
        ),
    );
    assert_eq!(got, want);
    assert_eq!(
        parse_bare("while 0 < 1 do skip done").unwrap(),
        Instr::while_loop(BExpr::lt(n(0), n(1)), Instr::Skip)
    );
}

#[test]
fn parse_bare_rejects_annotations() {
    assert!(parse_bare("{ 0 < 1 } skip").is_err());
    assert!(parse_bare("while x < n do [0 < 1] skip done").is_err());
}

#[test]
fn parse_assert_examples() {
    assert_eq!(
        parse_assert("pp(y,n)").unwrap(),
        Assert::Pred(ident("pp"), vec![v("y"), v("n")])
    );
    // `~` binds tighter than `/\`.
    assert_eq!(
        parse_assert("~ x < 3 /\\ le(x,n)").unwrap(),
        Assert::conj(
            Assert::not(Assert::Bool(BExpr::lt(v("x"), n(3)))),
            Assert::Pred(ident("le"), vec![v("x"), v("n")]),
        )
    );
    assert_eq!(
        parse_assert("0 < 1").unwrap(),
        Assert::Bool(BExpr::lt(n(0), n(1)))
    );
    // `/\` is right-associative.
    let abc = parse_assert("0 < 1 /\\ 0 < 2 /\\ 0 < 3").unwrap();
    match abc {
        Assert::Conj(_, rest) => assert!(matches!(*rest, Assert::Conj(..))),
        other => panic!("expected right-nested conj, got {other:?}"),
    }
}

#[test]
fn parse_assert_parenthesized_forms() {
    // `(` may open a parenthesized assertion or a comparison's left operand.
    assert_eq!(
        parse_assert("( x + 1 ) < y").unwrap(),
        Assert::Bool(BExpr::lt(AExpr::plus(v("x"), n(1)), v("y")))
    );
    assert_eq!(
        parse_assert("( 0 < 1 )").unwrap(),
        Assert::Bool(BExpr::lt(n(0), n(1)))
    );
    assert_eq!(
        parse_assert("~ ( 0 < 1 /\\ 0 < 2 )").unwrap(),
        Assert::not(Assert::conj(
            Assert::Bool(BExpr::lt(n(0), n(1))),
            Assert::Bool(BExpr::lt(n(0), n(2))),
        ))
    );
    assert_eq!(
        parse_assert("( ( 0 < 1 ) )").unwrap(),
        Assert::Bool(BExpr::lt(n(0), n(1)))
    );
}

#[test]
fn parse_negative_literals() {
    assert_eq!(parse_aexpr("-3").unwrap(), n(-3));
    assert_eq!(parse_aexpr("x + -3").unwrap(), AExpr::plus(v("x"), n(-3)));
    // `-` is a literal prefix, not an operator.
    assert!(parse_aexpr("- 3").is_err());
    assert!(parse_aexpr("x - y").is_err());
}

#[test]
fn parse_plus_left_associative() {
    assert_eq!(
        parse_aexpr("x + 1 + y").unwrap(),
        AExpr::plus(AExpr::plus(v("x"), n(1)), v("y"))
    );
    assert_eq!(
        parse_aexpr("1 + ( x + 2 )").unwrap(),
        AExpr::plus(n(1), AExpr::plus(v("x"), n(2)))
    );
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_bare("x :=").unwrap_err();
    assert_eq!(err.position(), (1, 5));
    let err = parse_bare("skip ;\n; skip").unwrap_err();
    assert_eq!(err.position(), (2, 1));
    match parse_assert("le(x,n").unwrap_err() {
        ParseError::Unexpected { expected, .. } => assert!(!expected.is_empty()),
        other => panic!("expected syntax error, got {other:?}"),
    }
    // Trailing garbage is rejected.
    assert!(parse_bare("skip skip").is_err());
}

#[test]
fn pretty_examples() {
    assert_eq!(AInstr::Skip.to_string(), "skip");
    assert_eq!(
        AExpr::plus(n(1), AExpr::plus(v("x"), n(2))).to_string(),
        "1 + ( x + 2 )"
    );
    assert_eq!(
        AExpr::plus(AExpr::plus(v("x"), n(1)), v("y")).to_string(),
        "x + 1 + y"
    );
    assert_eq!(Assert::true_assert().to_string(), "0 < 1");
    assert_eq!(
        Assert::Pred(ident("le"), vec![v("x"), v("n")]).to_string(),
        "le ( x , n )"
    );
    assert_eq!(Assert::Pred(ident("p"), vec![]).to_string(), "p ( )");
}

#[test]
fn pretty_parse_round_trip_on_sum_program() {
    let src = "while x < n do [le(x,n) /\\ pp(y,x)] x:=x+1; y:=x+y done";
    let ast = parse_instr(src).unwrap();
    let printed = ast.to_string();
    assert_eq!(parse_instr(&printed).unwrap(), ast);
}

#[test]
fn un_annot_examples() {
    let a = parse_instr("{ 0 < 1 } skip").unwrap();
    assert_eq!(un_annot(&a), Instr::Skip);

    let w = parse_instr("while x < n do [0 < 1] skip done").unwrap();
    assert_eq!(
        un_annot(&w),
        Instr::while_loop(BExpr::lt(v("x"), v("n")), Instr::Skip)
    );

    let ex1 = parse_instr("while x < n do [le(x,n) /\\ pp(y,x)] x:=x+1; y:=x+y done").unwrap();
    let bare = parse_bare("while x < n do x:=x+1; y:=x+y done").unwrap();
    assert_eq!(un_annot(&ex1), bare);
}

#[test]
fn mark_examples() {
    let f = Assert::false_assert;
    assert_eq!(mark(&Instr::Skip), AInstr::prec(f(), AInstr::Skip));
    assert_eq!(
        mark(&Instr::seq(Instr::Skip, Instr::Skip)),
        AInstr::seq(
            AInstr::prec(f(), AInstr::Skip),
            AInstr::prec(f(), AInstr::Skip)
        )
    );
    let b = BExpr::lt(n(1), n(0));
    assert_eq!(
        mark(&Instr::while_loop(b.clone(), Instr::Skip)),
        AInstr::prec(
            f(),
            AInstr::while_loop(b, f(), AInstr::prec(f(), AInstr::Skip))
        )
    );
}

#[test]
fn un_annot_mark_is_identity() {
    for src in [
        "skip",
        "x := x + 1",
        "x:=1; y:=2; while x < y do skip done",
        "while x < n do while y < x do y := y + 1 done done",
    ] {
        let i = parse_bare(src).unwrap();
        assert_eq!(un_annot(&mark(&i)), i);
    }
}

#[test]
fn point_path_display() {
    assert_eq!(PointPath::root().to_string(), "root");
    let p = PointPath(vec![PathStep::SeqFirst, PathStep::WhileBody, PathStep::PrecBody]);
    assert_eq!(p.to_string(), "1.body.prec");
}
