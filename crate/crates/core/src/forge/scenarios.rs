//! The standard scenario matrix: a spread of stores that together exercise
//! every parser, correlation rule, and examiner rule. Scripted user texts
//! are worded so the declared autonomy labels hold by construction (a
//! directly-instructed action is one whose object the user literally named).

use super::{
    ActionShape, ChildShape, CronJobShape, CronVenueShape, ExpectedAutonomy, ScenarioSpec,
    ScheduleShape, SessionKind, SessionShape, TurnShape,
};

fn main_session(turns: Vec<TurnShape>) -> SessionShape {
    let mut s = SessionShape::new(SessionKind::Main);
    s.telegram_headers = true;
    s.turns = turns;
    s
}

fn basic_turns() -> Vec<TurnShape> {
    vec![
        TurnShape::chat("good morning", "Good morning! Ready when you are."),
        TurnShape::chat("please delete /tmp/stale.lock", "Deleted /tmp/stale.lock.")
            .with_thinking("the user names the exact path; removing it")
            .with_actions(vec![ActionShape::exec(
                "rm /tmp/stale.lock",
                ExpectedAutonomy::Direct,
            )]),
    ]
}

fn spawn_turn(cleanup: bool) -> TurnShape {
    TurnShape::chat(
        "research solar panels and summarize",
        "Delegated the research; summary will follow.",
    )
    .with_thinking("this is a big task; delegating to a subagent")
    .with_actions(vec![ActionShape::spawn(
        "summarize solar panel options",
        ChildShape {
            actions: vec![ActionShape::write(
                "workspace/solar-summary.md",
                "# Solar\n\n3 viable options.",
                ExpectedAutonomy::Autonomous,
            )],
            final_text: "Summary written.".into(),
            cleanup,
        },
    )])
}

pub fn standard_scenarios() -> Vec<ScenarioSpec> {
    let mut scenarios = Vec::new();

    // 1. Minimal: one session, one message.
    let mut s = ScenarioSpec::new("minimal", 1001);
    s.sessions = vec![main_session(vec![TurnShape::chat("hello", "Hi there.")])];
    scenarios.push(s);

    // 2. Empty store: configuration and workspace only.
    let mut s = ScenarioSpec::new("empty", 1002);
    s.with_logs = false;
    scenarios.push(s);

    // 3. Telegram attribution with media.
    let mut s = ScenarioSpec::new("telegram-media", 1003);
    s.sessions = vec![main_session(vec![
        TurnShape::chat("here is the invoice", "Got it, filed.").with_media(),
        TurnShape::chat("and a voice note", "Transcribed and noted.").with_media(),
        TurnShape::chat("one more doc", "Saved.").with_media(),
    ])];
    s.extra_media = 2;
    scenarios.push(s);

    // 4. Direct vs interpretive autonomy.
    let mut s = ScenarioSpec::new("autonomy-direct", 1004);
    s.sessions = vec![main_session(vec![
        TurnShape::chat("please delete /tmp/x", "Removed /tmp/x.")
            .with_thinking("explicit object named; executing")
            .with_actions(vec![ActionShape::exec("rm /tmp/x", ExpectedAutonomy::Direct)]),
        TurnShape::chat(
            "write my standup summary to workspace/standup.md",
            "Standup summary written.",
        )
        .with_actions(vec![ActionShape::write(
            "workspace/standup.md",
            "- did things",
            ExpectedAutonomy::Direct,
        )]),
    ])];
    scenarios.push(s);

    let mut s = ScenarioSpec::new("autonomy-interpretive", 1005);
    s.sessions = vec![main_session(vec![
        TurnShape::chat("tidy up after yesterday", "Cleaned up the scratch area.")
            .with_thinking("vague request; choosing what to remove")
            .with_actions(vec![ActionShape::exec(
                "rm /var/agent/scratch.bin",
                ExpectedAutonomy::Interpretive,
            )]),
        TurnShape::chat("make a note about the garden project", "Noted.")
            .with_actions(vec![ActionShape::write(
                "workspace/memory/notes-today.txt",
                "garden: order seeds",
                ExpectedAutonomy::Interpretive,
            )]),
    ])];
    scenarios.push(s);

    // 6. Subagent delegation, child kept in the index.
    let mut s = ScenarioSpec::new("subagent-kept", 1006);
    s.sessions = vec![main_session(vec![
        TurnShape::chat("hello", "Hello!"),
        spawn_turn(false),
    ])];
    scenarios.push(s);

    // 7. Subagent delegation with cleanup: orphaned child transcript.
    let mut s = ScenarioSpec::new("subagent-cleanup", 1007);
    s.sessions = vec![main_session(vec![spawn_turn(true)])];
    scenarios.push(s);

    // 8. Isolated cron venue.
    let mut s = ScenarioSpec::new("cron-isolated", 1008);
    s.sessions = vec![main_session(vec![TurnShape::chat("hi", "Hi.")])];
    s.cron_jobs = vec![CronJobShape {
        name: "backup".into(),
        schedule: ScheduleShape::CronExpr("0 9 * * *".into()),
        venue: CronVenueShape::Isolated,
        runs: 2,
        actions_per_run: vec![ActionShape::exec(
            "tar -cf /backups/ws.tar workspace",
            ExpectedAutonomy::Autonomous,
        )],
    }];
    scenarios.push(s);

    // 9. Main-session cron venue (heartbeat-style message send).
    let mut s = ScenarioSpec::new("cron-main", 1009);
    s.sessions = vec![main_session(vec![TurnShape::chat("hi", "Hi.")])];
    s.cron_jobs = vec![CronJobShape {
        name: "remind".into(),
        schedule: ScheduleShape::EveryMinutes(60),
        venue: CronVenueShape::Main,
        runs: 2,
        actions_per_run: vec![ActionShape::send(
            "telegram:42",
            "reminder: water the plants",
            ExpectedAutonomy::Autonomous,
        )],
    }];
    scenarios.push(s);

    // 10. Orphaned cron run history (job since deleted).
    let mut s = ScenarioSpec::new("cron-orphan-run", 1010);
    s.sessions = vec![main_session(vec![TurnShape::chat("hi", "Hi.")])];
    s.orphan_cron_run = true;
    scenarios.push(s);

    // 11. One-shot `at` schedule.
    let mut s = ScenarioSpec::new("cron-at", 1011);
    s.sessions = vec![main_session(vec![TurnShape::chat("hi", "Hi.")])];
    s.cron_jobs = vec![CronJobShape {
        name: "once".into(),
        schedule: ScheduleShape::At,
        venue: CronVenueShape::Isolated,
        runs: 1,
        actions_per_run: vec![ActionShape::send(
            "telegram:42",
            "the one-shot fired",
            ExpectedAutonomy::Autonomous,
        )],
    }];
    scenarios.push(s);

    // 12. Soft-deleted session.
    let mut s = ScenarioSpec::new("soft-delete", 1012);
    let mut retired = main_session(vec![TurnShape::chat("old conversation", "Archived.")]);
    retired.kind = SessionKind::Named("errands".into());
    retired.soft_deleted = true;
    s.sessions = vec![main_session(basic_turns()), retired];
    scenarios.push(s);

    // 13. Config backup chain, adversarial timestamp order.
    let mut s = ScenarioSpec::new("config-adversarial", 1013);
    s.sessions = vec![main_session(vec![TurnShape::chat("hi", "Hi.")])];
    s.config_backups = 2;
    s.adversarial_backup_order = true;
    scenarios.push(s);

    // 14. Config chain with a snapshot missing meta (mtime fallback).
    let mut s = ScenarioSpec::new("config-mtime-fallback", 1014);
    s.sessions = vec![main_session(vec![TurnShape::chat("hi", "Hi.")])];
    s.config_backups = 2;
    s.backup_missing_meta = true;
    scenarios.push(s);

    // 15. Variant field spellings everywhere.
    let mut s = ScenarioSpec::new("variant-dialect", 1015);
    s.variant_dialect = true;
    s.sessions = vec![main_session(basic_turns())];
    scenarios.push(s);

    // 16. Native-thinking provider (structured thinking, no tags).
    let mut s = ScenarioSpec::new("native-thinking", 1016);
    let mut session = main_session(vec![
        TurnShape::chat("what's the weather", "Sunny, 19 degrees.")
            .with_thinking("needs the weather skill"),
        TurnShape::chat("list the files here", "Two files present.")
            .with_thinking("running a directory listing")
            .with_actions(vec![ActionShape::exec(
                "ls /home/user/notes",
                ExpectedAutonomy::Interpretive,
            )]),
    ]);
    session.native_thinking = true;
    s.sessions = vec![session];
    scenarios.push(s);

    // 17. Tag-filtered visibility with think+final tags.
    let mut s = ScenarioSpec::new("tag-filtered", 1017);
    s.sessions = vec![main_session(vec![
        TurnShape::chat("plan the weekend", "Saturday: hike. Sunday: rest.")
            .with_thinking("drafting a two-day plan"),
        TurnShape::chat("thanks", "Anytime."),
    ])];
    scenarios.push(s);

    // 18. Mid-session model change.
    let mut s = ScenarioSpec::new("model-change", 1018);
    let mut session = main_session(basic_turns());
    session.model_change_after_turn = Some(0);
    s.sessions = vec![session];
    scenarios.push(s);

    // 19. Compaction marker.
    let mut s = ScenarioSpec::new("compaction", 1019);
    let mut session = main_session(vec![
        TurnShape::chat("first topic", "Noted."),
        TurnShape::chat("second topic", "Also noted."),
        TurnShape::chat("third topic", "Summarizing context now."),
    ]);
    session.compaction_after_turn = Some(1);
    s.sessions = vec![session];
    scenarios.push(s);

    // 20. Capability drop: a tool disappears from later snapshots.
    let mut s = ScenarioSpec::new("capability-drop", 1020);
    s.sessions = vec![main_session(vec![
        TurnShape::chat("hello", "Hi."),
        TurnShape::chat("still there?", "Yes."),
        TurnShape::chat("status", "All good."),
    ])];
    s.capability_drop_from_run = Some((2, "exec".into()));
    scenarios.push(s);

    // 21. Headless agent-initiated session: memory-driven actions.
    let mut s = ScenarioSpec::new("headless-memory", 1021);
    let mut headless = SessionShape::new(SessionKind::Headless);
    headless.turns = vec![TurnShape {
        user_text: None,
        thinking: Some("reviewing workspace/memory/2026-02-28.md for follow-ups".into()),
        actions: vec![
            ActionShape::read(
                "workspace/memory/2026-02-28.md",
                "- daily note 0\n- follow up: water plants",
                ExpectedAutonomy::Autonomous,
            ),
            ActionShape::send(
                "telegram:42",
                "per workspace/memory/2026-02-28.md: watering reminder",
                ExpectedAutonomy::Autonomous,
            ),
        ],
        final_text: "Reminder sent.".into(),
        with_media: false,
    }];
    s.sessions = vec![main_session(vec![TurnShape::chat("hi", "Hi.")]), headless];
    s.memory_files = 3;
    scenarios.push(s);

    // 22. Missing prompt report: context gap caveat.
    let mut s = ScenarioSpec::new("missing-report", 1022);
    let mut session = main_session(basic_turns());
    session.with_prompt_report = false;
    s.sessions = vec![session];
    scenarios.push(s);

    // 23. Skills snapshot present.
    let mut s = ScenarioSpec::new("skills-snapshot", 1023);
    let mut session = main_session(vec![TurnShape::chat(
        "what skills do you have",
        "notes-helper and web-search.",
    )]);
    session.with_skills_snapshot = true;
    s.sessions = vec![session];
    scenarios.push(s);

    // 24. Multiple sessions incl. a named secondary session.
    let mut s = ScenarioSpec::new("multi-session", 1024);
    let mut named = SessionShape::new(SessionKind::Named("research".into()));
    named.turns = vec![
        TurnShape::chat("read workspace/TOOLS.md back to me", "It lists the ssh host homelab.")
            .with_actions(vec![ActionShape::read(
                "workspace/TOOLS.md",
                "# Environment\n\nssh host: homelab (alias hl)\n",
                ExpectedAutonomy::Direct,
            )]),
    ];
    s.sessions = vec![main_session(basic_turns()), named];
    scenarios.push(s);

    // 25. Memory-heavy workspace.
    let mut s = ScenarioSpec::new("memory-files", 1025);
    s.sessions = vec![main_session(vec![TurnShape::chat(
        "remember this: seed order arrives friday",
        "Stored in today's memory log.",
    )
    .with_actions(vec![ActionShape::write(
        "workspace/memory/2026-03-01.md",
        "- seed order arrives friday",
        ExpectedAutonomy::Interpretive,
    )])])];
    s.memory_files = 4;
    scenarios.push(s);

    // 26. Edit replay chain over a workspace file.
    let mut s = ScenarioSpec::new("edit-replay", 1026);
    s.sessions = vec![main_session(vec![
        TurnShape::chat(
            "write my profile to workspace/USER.md",
            "Profile saved.",
        )
        .with_actions(vec![ActionShape::write(
            "workspace/USER.md",
            "timezone: UTC\nproject: none",
            ExpectedAutonomy::Direct,
        )]),
        TurnShape::chat("update my project to garden", "Updated.")
            .with_actions(vec![ActionShape::edit(
                "workspace/USER.md",
                "project: none",
                "project: garden",
                ExpectedAutonomy::Interpretive,
            )]),
    ])];
    scenarios.push(s);

    // 27. Unicode content end to end.
    let mut s = ScenarioSpec::new("unicode", 1027);
    s.sessions = vec![main_session(vec![
        TurnShape::chat("日本語でメモを取って 🌱", "メモしました 🌿"),
        TurnShape::chat("merci beaucoup — à demain", "À demain !"),
    ])];
    scenarios.push(s);

    // 28. Exec error path with details.
    let mut s = ScenarioSpec::new("exec-error", 1028);
    let mut action = ActionShape::exec("cat /etc/shadow", ExpectedAutonomy::Interpretive);
    action.is_error = true;
    s.sessions = vec![main_session(vec![TurnShape::chat(
        "show me the system users",
        "That file is not readable; permission denied.",
    )
    .with_thinking("trying the obvious file")
    .with_actions(vec![action])])];
    scenarios.push(s);

    // 29. Everything at once.
    let mut s = ScenarioSpec::new("full", 1029);
    let mut main = main_session(basic_turns());
    main.turns.push(spawn_turn(true));
    main.turns.push(TurnShape::chat("send the summary when done", "Will do.").with_media());
    main.model_change_after_turn = Some(1);
    main.compaction_after_turn = Some(2);
    main.with_skills_snapshot = true;
    let mut retired = SessionShape::new(SessionKind::Named("scratch".into()));
    retired.turns = vec![TurnShape::chat("temp chat", "Ok.")];
    retired.soft_deleted = true;
    s.sessions = vec![main, retired];
    s.cron_jobs = vec![
        CronJobShape {
            name: "backup".into(),
            schedule: ScheduleShape::CronExpr("30 7 * * 1-5".into()),
            venue: CronVenueShape::Isolated,
            runs: 1,
            actions_per_run: vec![ActionShape::exec(
                "tar -cf /backups/ws.tar workspace",
                ExpectedAutonomy::Autonomous,
            )],
        },
        CronJobShape {
            name: "remind".into(),
            schedule: ScheduleShape::EveryMinutes(240),
            venue: CronVenueShape::Main,
            runs: 1,
            actions_per_run: vec![ActionShape::send(
                "telegram:42",
                "scheduled check-in",
                ExpectedAutonomy::Autonomous,
            )],
        },
    ];
    s.config_backups = 2;
    s.adversarial_backup_order = true;
    s.memory_files = 2;
    s.extra_media = 1;
    scenarios.push(s);

    scenarios
}
