from sf_attribution.cli.main import main

raise SystemExit(main())
