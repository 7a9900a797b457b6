from scaled_trajectories.v1 import main

raise SystemExit(main())
